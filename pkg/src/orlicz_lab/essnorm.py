"""Level sets, limsup indices, and the essential-norm sandwich.

The essential norm is never computed exactly.  The module produces the
bracket [beta(E(u)), C beta(phi*^{-1}(E phi*|u|))] plus an independent
upper estimate from finite-rank truncations, mirroring the compactness
dichotomy for conditional operators on atomic parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .errors import ArgumentError
from .space import (MeasurableFn, SubAlgebra, SymbolicAtomSequence, cond_exp,
                    fn_from_array, is_measurable, sigma_algebra)
from .wct import OperatorSpec, op_norm_lower
from .young import RATIO_CEILING, YoungFunction, conjugate

LEVEL_CLASSES = ("finitely-many-atoms", "infinitely-many-atoms",
                 "contains-non-atomic-mass")
BETA_SOURCES = ("atomic-limsup", "non-atomic-esssup", "max-of-both")

# threshold slack for the beta <-> level-set equivalence; tails like L + c/n
# clear the inspection window only once eps is this far above the limit
BETA_TOL = 1e-2

LevelInput = Union[MeasurableFn, SymbolicAtomSequence]


@dataclass(frozen=True)
class LevelSetReport:
    epsilon: float
    members: tuple
    classification: str

    def __post_init__(self):
        if self.classification not in LEVEL_CLASSES:
            raise ArgumentError(
                f"unknown classification {self.classification!r}")


@dataclass(frozen=True)
class BetaResult:
    beta: float
    source: str
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in BETA_SOURCES:
            raise ArgumentError(f"unknown beta source {self.source!r}")


def _real_values(h: MeasurableFn) -> np.ndarray:
    if np.iscomplexobj(h.arr):
        raise ArgumentError("level analysis needs a real-valued function")
    return h.arr


def _block_values(h: MeasurableFn, alg: SubAlgebra) -> np.ndarray:
    if not is_measurable(h, alg):
        raise ArgumentError("function is not block-constant on the algebra")
    vals = np.zeros(alg.n_blocks)
    vals[alg.cell_block] = _real_values(h)
    return vals


def level_set(h: LevelInput, eps: float,
              alg: Optional[SubAlgebra] = None) -> LevelSetReport:
    """Members with h >= eps, classified by what kind of mass they carry."""
    if not eps > 0.0:
        raise ArgumentError("eps must be positive")
    if isinstance(h, SymbolicAtomSequence):
        vals = h.values()
        qual = vals >= eps
        members = tuple(int(n) for n in np.nonzero(qual)[0] + 1)
        tail = qual[h.n_max // 2:]
        if tail.size and bool(tail.all()):
            cls = "infinitely-many-atoms"
        else:
            cls = "finitely-many-atoms"
        return LevelSetReport(float(eps), members, cls)
    if alg is None:
        alg = sigma_algebra(h.space)
    vals = _block_values(h, alg)
    qual = vals >= eps
    members = tuple(b.label for b, q in zip(alg.blocks, qual) if q)
    carrier_hit = any(b.kind == "carrier" for b, q in zip(alg.blocks, qual) if q)
    cls = "contains-non-atomic-mass" if carrier_hit else "finitely-many-atoms"
    return LevelSetReport(float(eps), members, cls)


def _aitken_limit(x0: float, x1: float, x2: float) -> Optional[float]:
    # only extrapolate convergent-looking probes: shrinking increments
    if not abs(x2 - x1) < abs(x1 - x0):
        return None
    denom = x2 - 2.0 * x1 + x0
    if denom == 0.0 or not np.isfinite(denom):
        return None
    a = x2 - (x2 - x1) ** 2 / denom
    if not np.isfinite(a) or a < 0.0 or abs(a - x2) > 4.0 * abs(x2 - x0) + 1e-12:
        return None
    return float(a)


def beta(h: LevelInput, alg: Optional[SubAlgebra] = None) -> BetaResult:
    """Smallest eps beyond which the level sets are finite atom families.

    Symbolic tails: limsup |h(n)| estimated from the window [n_max/2, n_max]
    with an extrapolation refinement on geometric index probes.  Finite
    spaces: ess-sup of |h| over carrier blocks; finite atom families never
    obstruct, so they contribute 0.
    """
    if isinstance(h, SymbolicAtomSequence):
        vals = np.abs(h.values())
        n = h.n_max
        window = vals[n // 2 - 1:] if n >= 2 else vals
        wmax = float(window.max())
        details: dict = {"window_max": wmax, "estimator": "window-max"}
        if not np.isfinite(wmax):
            return BetaResult(float("inf"), "atomic-limsup", details)
        probes = [max(n // 4, 1), max(n // 2, 1), n]
        x0, x1, x2 = (float(vals[p - 1]) for p in probes)
        if x0 < x1 < x2 and wmax > RATIO_CEILING:
            details["estimator"] = "increasing-unbounded"
            return BetaResult(float("inf"), "atomic-limsup", details)
        est = _aitken_limit(x0, x1, x2)
        if est is not None:
            details.update(estimator="aitken", probes=probes)
            return BetaResult(est, "atomic-limsup", details)
        return BetaResult(wmax, "atomic-limsup", details)

    if alg is None:
        alg = sigma_algebra(h.space)
    vals = np.abs(_block_values(h, alg))
    kinds = np.array([b.kind == "carrier" for b in alg.blocks])
    carrier_part = float(vals[kinds].max()) if kinds.any() else 0.0
    details = {"n_carrier_blocks": int(kinds.sum()),
               "n_atom_blocks": int((~kinds).sum())}
    if kinds.any() and (~kinds).any():
        source = "max-of-both"
    elif kinds.any():
        source = "non-atomic-esssup"
    else:
        source = "atomic-limsup"
    return BetaResult(carrier_part, source, details)


@dataclass(frozen=True)
class SandwichResult:
    lower: float
    upper: float
    gch_C: float
    lower_beta: BetaResult
    upper_beta: BetaResult
    hypotheses: dict = field(default_factory=dict)

    def __iter__(self):
        # unpacks as the (lower, upper) pair
        return iter((self.lower, self.upper))


def _criterion_fn(u: MeasurableFn, phi: YoungFunction,
                  alg: SubAlgebra) -> MeasurableFn:
    phi_star = conjugate(phi)
    e = cond_exp(MeasurableFn(u.space, tuple(phi_star.eval_many(np.abs(u.arr)))),
                 alg)
    return MeasurableFn(u.space, tuple(phi_star.inverse_many(e.arr)))


def criterion_function(u: MeasurableFn, phi: YoungFunction,
                       alg: SubAlgebra) -> MeasurableFn:
    """phi*^{-1}(E phi*|u|): the function whose level sets drive the bracket."""
    return _criterion_fn(u, phi, alg)


def ess_norm_sandwich(u: Union[MeasurableFn, SymbolicAtomSequence],
                      phi: YoungFunction, alg: Optional[SubAlgebra] = None,
                      gch_C: float = 1.0, masses_to_zero: Optional[bool] = None,
                      no_convergent_subsequence: Optional[bool] = None
                      ) -> SandwichResult:
    """Bracket [beta(E(u)), C beta(phi*^{-1}(E phi*|u|))]; the subsequence
    hypotheses cannot be introspected and are echoed as caller flags."""
    hyp = {"masses_to_zero": masses_to_zero,
           "no_convergent_subsequence": no_convergent_subsequence}
    if isinstance(u, SymbolicAtomSequence):
        if alg is not None:
            raise ArgumentError("symbolic sequences fix the algebra to their atoms")
        # on the atoms E is the identity and phi*^{-1}(phi*|u|) = |u|
        lower_b = beta(u)
        upper_b = lower_b
    else:
        if alg is None:
            raise ArgumentError("finite spaces need the sub-algebra")
        lower_b = beta(cond_exp(u, alg), alg)
        upper_b = beta(_criterion_fn(u, phi, alg), alg)
    return SandwichResult(lower_b.beta, float(gch_C) * upper_b.beta,
                          float(gch_C), lower_b, upper_b, hyp)


def _validate_ks(ks: Iterable[int]) -> list[int]:
    out = [int(k) for k in ks]
    if not out or any(k < 1 for k in out) or any(
            b <= a for a, b in zip(out, out[1:])):
        raise ArgumentError("ks must be a strictly increasing list of "
                            "positive integers")
    return out


def truncation_distance_curve(u: Union[MeasurableFn, SymbolicAtomSequence],
                              phi: YoungFunction, ks: Iterable[int],
                              alg: Optional[SubAlgebra] = None,
                              budget: int = 120) -> tuple:
    """Distances ||R_u - R_{u_k}|| for truncations keeping the first k atoms
    plus every cell above the beta threshold; non-increasing in k by
    construction, and an upper estimate of the essential norm in the limit."""
    ks = _validate_ks(ks)
    if isinstance(u, SymbolicAtomSequence):
        if alg is not None:
            raise ArgumentError("symbolic sequences fix the algebra to their atoms")
        upto = min(u.n_max, 2 * max(ks) + 16)
        space, salg, ufn = u.materialize(upto)
        w_cells = np.abs(ufn.arr)
        b = beta(u).beta
    else:
        if alg is None:
            raise ArgumentError("finite spaces need the sub-algebra")
        space, salg, ufn = u.space, alg, u
        w_cells = _real_values(_criterion_fn(u, phi, alg))
        b = beta(_criterion_fn(u, phi, alg), alg).beta
    keep_eps = BETA_TOL * max(1.0, b)
    level_keep = w_cells >= b + keep_eps

    atom_block_ids = [bi for bi, blk in enumerate(salg.blocks)
                      if blk.kind == "a-atom"]
    dists = []
    for k in ks:
        kept_blocks = set(atom_block_ids[:k])
        in_prefix = np.isin(salg.cell_block, list(kept_blocks))
        residual = np.where(in_prefix | level_keep, 0.0, ufn.arr)
        if not np.any(residual != 0.0):
            dists.append(0.0)
            continue
        op = OperatorSpec(fn_from_array(space, residual), salg, phi, phi)
        est = op_norm_lower(op, budget=budget, seed=1000 + k)
        dists.append(float(est.lower_bound))
    # enforce the non-increasing contract against estimator wiggle
    for i in range(len(dists) - 2, -1, -1):
        dists[i] = max(dists[i], dists[i + 1])
    return tuple((k, d) for k, d in zip(ks, dists))

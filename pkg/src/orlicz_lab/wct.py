"""Weighted conditional operators f -> E(uf), multiplication operators, and
empirical lower bounds for their norms between Orlicz spaces.

Norms are certified from below by maximizing the ratio
N_psi(op f) / N_phi(f) over structured and random candidates; theoretical
upper bounds come from the criteria module, giving two-sided sandwiches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ArgumentError
from .orlicz import lux_norm
from .space import MeasurableFn, SubAlgebra, cond_exp, is_measurable
from .young import YoungFunction

OPERATOR_KINDS = ("wct", "mult")

DEFAULT_SEED = 7


@dataclass(frozen=True)
class OperatorSpec:
    u: MeasurableFn
    alg: SubAlgebra
    domain_phi: YoungFunction
    codomain_psi: YoungFunction
    kind: str = "wct"

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ArgumentError(f"kind must be one of {OPERATOR_KINDS}")
        if self.u.space is not self.alg.space and self.u.space != self.alg.space:
            raise ArgumentError("weight u must live on the sub-algebra's space")

    @property
    def space(self):
        return self.u.space


@dataclass(frozen=True)
class NormEstimate:
    lower_bound: float
    witness: Optional[MeasurableFn]
    candidates_tried: int


def apply(op: OperatorSpec, f: MeasurableFn) -> MeasurableFn:
    if f.space is not op.space and f.space != op.space:
        raise ArgumentError("function lives on a different space")
    if op.kind == "mult":
        return op.u * f
    return cond_exp(op.u * f, op.alg)


def rayleigh_ratio(op: OperatorSpec, f: MeasurableFn) -> float:
    """N_psi(op f) / N_phi(f); 0 when f has zero norm."""
    denom = lux_norm(op.domain_phi, f).value
    if denom == 0.0:
        return 0.0
    numer = lux_norm(op.codomain_psi, apply(op, f)).value
    return numer / denom


def _indicator_candidates(op: OperatorSpec) -> list[np.ndarray]:
    n = op.space.n_cells
    out = []
    for blk in op.alg.blocks:
        v = np.zeros(n)
        for cid in blk.cells:
            v[op.space.index_of(cid)] = 1.0
        out.append(v)
    # single cells refine the search inside non-singleton blocks
    if any(len(b.cells) > 1 for b in op.alg.blocks):
        for i in range(n):
            v = np.zeros(n)
            v[i] = 1.0
            out.append(v)
    return out


def _random_candidates(op: OperatorSpec, count: int, rng) -> list[np.ndarray]:
    n = op.space.n_cells
    out = []
    for _ in range(count):
        mag = rng.exponential(scale=1.0, size=n)
        sign = rng.choice((-1.0, 1.0), size=n)
        out.append(mag * sign)
    return out


def _ascent(op: OperatorSpec, start: np.ndarray, start_ratio: float,
            sweeps: int) -> tuple[np.ndarray, float, int]:
    x = start.copy()
    best = start_ratio
    tried = 0
    n = len(x)
    for _ in range(sweeps):
        improved = False
        for i in range(n):
            base = x[i]
            for step in (2.0, 0.5, -1.0):
                trial = base * step if step > 0 else -base
                if trial == base:
                    continue
                x[i] = trial
                tried += 1
                r = rayleigh_ratio(op, MeasurableFn(op.space, tuple(x)))
                if r > best * (1.0 + 1e-12):
                    best = r
                    base = trial
                    improved = True
                else:
                    x[i] = base
        if not improved:
            break
    return x, best, tried


def op_norm_lower(op: OperatorSpec, strategy: str = "all", budget: int = 200,
                  seed: int = DEFAULT_SEED) -> NormEstimate:
    """Best Rayleigh ratio over the chosen candidate family.

    Deterministic for a fixed seed; ties keep the earliest candidate.
    """
    if strategy not in ("atoms", "random", "ascent", "all"):
        raise ArgumentError("strategy must be atoms | random | ascent | all")
    if budget < 1:
        raise ArgumentError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    cand: list[np.ndarray] = []
    if strategy in ("atoms", "all"):
        cand.extend(_indicator_candidates(op))
    if strategy in ("random", "all"):
        cand.extend(_random_candidates(op, budget, rng))
    if strategy == "ascent" and not cand:
        cand.append(np.ones(op.space.n_cells))

    best_vec = cand[0]
    best = -1.0
    tried = 0
    for v in cand:
        tried += 1
        r = rayleigh_ratio(op, MeasurableFn(op.space, tuple(v)))
        if r > best:
            best = r
            best_vec = v
    if strategy in ("ascent", "all"):
        sweeps = budget if strategy == "ascent" else max(1, budget // 50)
        best_vec, best, extra = _ascent(op, best_vec, best, sweeps)
        tried += extra
    witness = MeasurableFn(op.space, tuple(best_vec))
    return NormEstimate(lower_bound=max(best, 0.0), witness=witness,
                        candidates_tried=tried)


def adjoint_defect(op: OperatorSpec, f: MeasurableFn, g: MeasurableFn):
    """Pairing residual <R_u f, g> - <f, M_ubar g> for A-measurable g.

    Both integrals use the sesquilinear pairing (a, b) -> integral of
    a * conj(b); the identity needs g constant on blocks.
    """
    if op.kind != "wct":
        raise ArgumentError("adjoint_defect applies to wct operators")
    if g.space is not op.space and g.space != op.space:
        raise ArgumentError("g lives on a different space")
    if not is_measurable(g, op.alg):
        raise ArgumentError("g must be constant on the sub-algebra's blocks")
    mass = op.space.masses
    lhs = np.dot(apply(op, f).arr * np.conj(g.arr), mass)
    rhs = np.dot(f.arr * np.conj(np.conj(op.u.arr) * g.arr), mass)
    return complex(lhs - rhs)

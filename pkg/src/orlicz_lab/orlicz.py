"""Modulars, Luxemburg norms, and product-norm inequalities on finite spaces.

The norm solver bisects k in the monotone map k -> integral of phi(|f|/k).
Closed-form families go through the compiled kernels; wrapper families
(tabulated, conjugate_of, compose_of) take the generic path with identical
bracketing semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import ArgumentError, NumericError, PreconditionError
from .space import MeasurableFn
from .young import (MAX_ITER, REL_TOL, YoungFunction, _FAMILY_CODES,
                    conjugate, standard_grid)

_EXPANSION_CAP = 1100


@dataclass(frozen=True)
class NormResult:
    value: float
    modular_at_value: float
    iterations: int

    def __float__(self) -> float:
        return self.value


def _family_code(phi: YoungFunction) -> Optional[tuple[int, float]]:
    code = _FAMILY_CODES.get(phi.family)
    if code is None:
        return None
    p = phi.params[0] if phi.params else 0.0
    return code, p


def modular(phi: YoungFunction, f: MeasurableFn) -> float:
    """Integral of phi(|f|) over the space; +inf on overflow."""
    absf = np.abs(f.arr)
    fam = _family_code(phi)
    if fam is not None:
        return _kernels.modular_weighted(fam[0], fam[1], absf, f.space.masses)
    vals = phi.eval_many(absf)
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.dot(vals, f.space.masses))


def _modular_scaled(phi: YoungFunction, absf: np.ndarray, mass: np.ndarray, k: float) -> float:
    vals = phi.eval_many(absf / k)
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.dot(vals, mass))


def _lux_norm_generic(phi: YoungFunction, absf: np.ndarray, mass: np.ndarray) -> NormResult:
    top = float(absf.max()) if absf.size else 0.0
    if top == 0.0:
        return NormResult(0.0, 0.0, 0)

    def mod(k: float) -> float:
        return _modular_scaled(phi, absf, mass, k)

    iterations = 0
    hi = top
    while mod(hi) > 1.0:
        hi *= 2.0
        iterations += 1
        if iterations > _EXPANSION_CAP:
            raise NumericError("luxemburg bracket expansion failed")
    lo = hi / 2.0 if hi > top else top
    while lo > 0.0 and mod(lo) <= 1.0:
        lo /= 2.0
        iterations += 1
        if lo < 1e-300:
            lo = 0.0
            break
    it = 0
    while it < MAX_ITER and (hi - lo) > REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if mod(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return NormResult(hi, mod(hi), iterations + it)


def lux_norm(phi: YoungFunction, f: MeasurableFn) -> NormResult:
    """Smallest k with modular(phi, f/k) <= 1; 0 for the zero function."""
    absf = np.abs(f.arr)
    fam = _family_code(phi)
    if fam is not None:
        try:
            value, mod_at, iters = _kernels.lux_norm_family(
                fam[0], fam[1], absf, f.space.masses, REL_TOL, MAX_ITER)
        except OverflowError as exc:
            raise NumericError(str(exc)) from None
        return NormResult(value, mod_at, iters)
    return _lux_norm_generic(phi, absf, f.space.masses)


def holder_defect(phi: YoungFunction, f: MeasurableFn, g: MeasurableFn) -> float:
    """2 N_phi(f) N_phi*(g) minus the integral of |fg|; >= 0 up to rounding."""
    if f.space is not g.space and f.space != g.space:
        raise ArgumentError("holder_defect needs both functions on one space")
    nf = lux_norm(phi, f).value
    ng = lux_norm(conjugate(phi), g).value
    prod = float(np.dot(np.abs(f.arr * g.arr), f.space.masses))
    return 2.0 * nf * ng - prod


def certify_product_bound(phi1: YoungFunction, phi2: YoungFunction,
                          phi3: YoungFunction,
                          grid: Optional[np.ndarray] = None) -> bool:
    """Grid check of phi3(xy) <= phi1(x) + phi2(y) over all grid pairs."""
    g = standard_grid() if grid is None else np.asarray(grid, dtype=float)
    x = g[:, None]
    y = g[None, :]
    lhs = phi3.eval_many((x * y).ravel()).reshape(len(g), len(g))
    rhs = phi1.eval_many(g)[:, None] + phi2.eval_many(g)[None, :]
    with np.errstate(invalid="ignore"):
        ok = np.isinf(rhs) | (lhs <= rhs * (1.0 + 1e-9) + 1e-12)
    return bool(ok.all())


def product_norm_defect(phi1: YoungFunction, phi2: YoungFunction,
                        phi3: YoungFunction, f1: MeasurableFn, f2: MeasurableFn,
                        cert_grid: Optional[np.ndarray] = None) -> float:
    """2 N_1(f1) N_2(f2) - N_3(f1 f2), after certifying the pointwise
    hypothesis phi3(xy) <= phi1(x) + phi2(y) on the grid."""
    if f1.space is not f2.space and f1.space != f2.space:
        raise ArgumentError("product_norm_defect needs both functions on one space")
    if not certify_product_bound(phi1, phi2, phi3, grid=cert_grid):
        raise PreconditionError(
            "phi3(xy) <= phi1(x) + phi2(y) failed the grid certification")
    n1 = lux_norm(phi1, f1).value
    n2 = lux_norm(phi2, f2).value
    prod = MeasurableFn(f1.space, tuple(np.abs(f1.arr) * np.abs(f2.arr)))
    n3 = lux_norm(phi3, prod).value
    return 2.0 * n1 * n2 - n3

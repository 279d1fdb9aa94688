"""Pure numpy kernels.  Mirror of the compiled core in ``_core.pyx``.

Both backends must agree on the piecewise series thresholds so that results
match across backends to near machine precision.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Family codes shared with the compiled kernel.
FAM_POWER = 0
FAM_POWER_SCALED = 1
FAM_EXP_POWER = 2
FAM_ENTROPY = 3
FAM_LOG_QUOTIENT = 4
FAM_EXP_QUARTIC = 5

_EXP_OVERFLOW = 709.0
_SERIES_CUT = 1e-3


def _exprel2(t: np.ndarray) -> np.ndarray:
    """e^t - t - 1, stable for small t, +inf past overflow."""
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    small = t < _SERIES_CUT
    ts = t[small]
    out[small] = ts * ts * (
        0.5 + ts * (1.0 / 6 + ts * (1.0 / 24 + ts * (1.0 / 120 + ts * (1.0 / 720 + ts / 5040))))
    )
    big = ~small
    tb = t[big]
    with np.errstate(over="ignore"):
        vals = np.expm1(tb) - tb
    vals[tb >= _EXP_OVERFLOW] = np.inf
    out[big] = vals
    return out


def _entln(s: np.ndarray) -> np.ndarray:
    """(1+s) log(1+s) - s, stable for small s."""
    s = np.asarray(s, dtype=np.float64)
    out = np.empty_like(s)
    small = s < _SERIES_CUT
    ss = s[small]
    out[small] = ss * ss * (
        0.5 + ss * (-1.0 / 6 + ss * (1.0 / 12 + ss * (-1.0 / 20 + ss * (1.0 / 30 - ss / 42))))
    )
    big = ~small
    sb = s[big]
    with np.errstate(over="ignore", invalid="ignore"):
        vals = (1.0 + sb) * np.log1p(sb) - sb
    vals[np.isinf(sb)] = np.inf
    out[big] = vals
    return out


def eval_family(fam: int, p: float, x: np.ndarray) -> np.ndarray:
    """Evaluate a closed-form Young family elementwise on |x| >= 0."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        if fam == FAM_POWER:
            return np.power(x, p)
        if fam == FAM_POWER_SCALED:
            return np.power(x, p) / p
        if fam == FAM_EXP_POWER:
            return _exprel2(np.power(x, p))
        if fam == FAM_ENTROPY:
            return _entln(np.power(x, p))
        if fam == FAM_LOG_QUOTIENT:
            return x * x / np.log(np.e + x)
        if fam == FAM_EXP_QUARTIC:
            t = np.power(x, 4)
            out = np.expm1(t)
            if out.ndim:
                out[t >= _EXP_OVERFLOW] = np.inf
            elif t >= _EXP_OVERFLOW:
                out = np.float64(np.inf)
            return out
    raise ValueError(f"unknown family code {fam}")


def modular_weighted(fam: int, p: float, absf: np.ndarray, mass: np.ndarray) -> float:
    """Sum of phi(absf)·mass; +inf propagates from overflow."""
    vals = eval_family(fam, p, absf)
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.dot(vals, mass))


def lux_norm_family(
    fam: int,
    p: float,
    absf: np.ndarray,
    mass: np.ndarray,
    rel_tol: float,
    max_iter: int,
) -> tuple[float, float, int]:
    """Luxemburg-norm bisection for a family-coded Young function.

    Returns (value, modular at value, iterations).  The returned value is the
    certified upper end of the final bracket, so its modular is <= 1.
    """
    absf = np.asarray(absf, dtype=np.float64)
    mass = np.asarray(mass, dtype=np.float64)
    top = float(absf.max()) if absf.size else 0.0
    if top == 0.0:
        return 0.0, 0.0, 0

    def mod(k: float) -> float:
        return modular_weighted(fam, p, absf / k, mass)

    iterations = 0
    hi = top
    while mod(hi) > 1.0:
        hi *= 2.0
        iterations += 1
        if iterations > 1100:
            raise OverflowError("luxemburg bracket expansion failed")
    lo = hi / 2.0 if hi > top else top
    while lo > 0.0 and mod(lo) <= 1.0:
        lo /= 2.0
        iterations += 1
        if lo < 1e-300:
            lo = 0.0
            break
    # invariant: mod(lo) > 1 (or lo == 0) and mod(hi) <= 1
    it = 0
    while it < max_iter and (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if mod(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return hi, mod(hi), iterations + it

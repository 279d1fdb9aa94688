"""Young functions: construction, evaluation, inversion, conjugation and
grid-certified growth conditions.

A Young function here is an even convex function vanishing at zero with
superlinear growth.  Six closed-form families are built in; tables,
numeric conjugates and compositions wrap them.  All growth verdicts are
certified on a finite log-spaced grid, never proved symbolically: a
``holds_globally`` flag means "holds at every grid point", nothing more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import ArgumentError, DomainError, NumericError, TableRangeError

__all__ = [
    "YoungFunction",
    "GrowthReport",
    "CompositionCheck",
    "power",
    "power_scaled",
    "exp_power",
    "entropy",
    "log_quotient",
    "exp_quartic",
    "tabulated",
    "compose",
    "conjugate",
    "conjugate_eval",
    "conjugate_eval_many",
    "check_growth",
    "is_young_composition",
    "validate_young",
    "standard_grid",
]

GRID_LO = 1e-3
GRID_HI = 1e3
GRID_POINTS = 64

REL_TOL = 1e-10
# golden-section loops report optimum values, which move quadratically in
# the bracket width, so a looser width stop loses nothing measurable and
# matters a lot when conjugations nest
SUP_WIDTH_TOL = 1e-7
MAX_ITER = 200
RATIO_CEILING = 1e12

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

_FAMILY_CODES = {
    "power": _kernels.FAM_POWER,
    "power_scaled": _kernels.FAM_POWER_SCALED,
    "exp_power": _kernels.FAM_EXP_POWER,
    "entropy": _kernels.FAM_ENTROPY,
    "log_quotient": _kernels.FAM_LOG_QUOTIENT,
    "exp_quartic": _kernels.FAM_EXP_QUARTIC,
}
_PARAMETRIC = {"power", "power_scaled", "exp_power", "entropy"}
_WRAPPERS = {"tabulated", "conjugate_of", "compose_of"}
CLOSED_FAMILIES = tuple(_FAMILY_CODES)

GROWTH_CONDITIONS = ("delta2", "delta-prime", "nabla-prime", "precedes")


def standard_grid(n: int = GRID_POINTS, lo: float = GRID_LO, hi: float = GRID_HI) -> np.ndarray:
    """Log-spaced certification grid used by every growth check."""
    return np.geomspace(lo, hi, n)


@dataclass(frozen=True)
class YoungFunction:
    """A Young function given by a family tag plus parameters.

    ``members`` holds referenced functions for the wrapper families
    (``conjugate_of``: the base; ``compose_of``: outer then inner).
    ``invert_inner`` makes ``compose_of`` evaluate outer(inner^{-1}(x))
    instead of outer(inner(x)).
    """

    family: str
    params: tuple[float, ...] = ()
    table: tuple[tuple[float, float], ...] | None = None
    members: tuple["YoungFunction", ...] = ()
    invert_inner: bool = False

    def __post_init__(self) -> None:
        if self.family not in _FAMILY_CODES and self.family not in _WRAPPERS:
            raise ArgumentError(f"unknown Young family {self.family!r}")
        if self.family in _PARAMETRIC:
            if len(self.params) != 1:
                raise ArgumentError(f"{self.family} takes exactly one parameter")
            p = self.params[0]
            if not (p > 0 and math.isfinite(p)):
                raise ArgumentError(f"{self.family} parameter must be positive, got {p}")
            if self.family == "exp_power" and p < 1:
                raise ArgumentError("exp_power requires p >= 1")
        elif self.family in ("log_quotient", "exp_quartic"):
            if self.params:
                raise ArgumentError(f"{self.family} takes no parameters")
        if self.family == "tabulated":
            self._check_table()
        if self.family == "conjugate_of" and len(self.members) != 1:
            raise ArgumentError("conjugate_of needs exactly one member")
        if self.family == "compose_of" and len(self.members) != 2:
            raise ArgumentError("compose_of needs exactly (outer, inner) members")

    def _check_table(self) -> None:
        if not self.table or len(self.table) < 2:
            raise ArgumentError("tabulated needs at least two (x, y) rows")
        xs = np.array([r[0] for r in self.table], dtype=float)
        ys = np.array([r[1] for r in self.table], dtype=float)
        if np.any(xs <= 0) or np.any(ys <= 0):
            raise ArgumentError("tabulated rows must have positive x and y")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ArgumentError("tabulated rows must be strictly increasing in x and y")

    # -- evaluation ---------------------------------------------------------

    @property
    def p(self) -> float:
        if not self.params:
            raise ArgumentError(f"{self.family} has no parameter")
        return self.params[0]

    def eval(self, x: float) -> float:
        """Phi(|x|); Young functions are even."""
        return float(self.eval_many(np.array([x], dtype=float))[0])

    def eval_many(self, xs: Iterable[float] | np.ndarray) -> np.ndarray:
        arr = np.abs(np.asarray(xs, dtype=float))
        code = _FAMILY_CODES.get(self.family)
        if code is not None:
            p = self.params[0] if self.params else 1.0
            return np.asarray(_kernels.eval_family(code, p, arr), dtype=float)
        if self.family == "tabulated":
            return self._eval_table(arr)
        if self.family == "conjugate_of":
            return conjugate_eval_many(self.members[0], arr)
        # compose_of
        outer, inner = self.members
        mid = inner.inverse_many(arr) if self.invert_inner else inner.eval_many(arr)
        return outer.eval_many(mid)

    def _eval_table(self, arr: np.ndarray) -> np.ndarray:
        xs = np.array([r[0] for r in self.table], dtype=float)
        ys = np.array([r[1] for r in self.table], dtype=float)
        out = np.zeros_like(arr)
        nz = arr != 0
        vals = arr[nz]
        if vals.size and (vals.min() < xs[0] * (1 - 1e-12) or vals.max() > xs[-1] * (1 + 1e-12)):
            raise TableRangeError(
                f"tabulated evaluation outside range [{xs[0]}, {xs[-1]}]"
            )
        out[nz] = np.exp(np.interp(np.log(vals), np.log(xs), np.log(ys)))
        return out

    # -- inversion ----------------------------------------------------------

    def inverse(self, y: float) -> float:
        return float(self.inverse_many(np.array([y], dtype=float))[0])

    def inverse_many(self, ys: Iterable[float] | np.ndarray) -> np.ndarray:
        arr = np.asarray(ys, dtype=float)
        if np.any(arr < 0):
            raise DomainError("inverse requires non-negative arguments")
        shape = arr.shape
        flat = arr.ravel()
        if self.family == "power":
            out = np.power(flat, 1.0 / self.p)
        elif self.family == "power_scaled":
            out = np.power(self.p * flat, 1.0 / self.p)
        elif self.family == "tabulated":
            out = self._inverse_table(flat)
        elif self.family == "conjugate_of":
            out = _conjugate_inverse_many(self.members[0], flat)
        elif self.family == "compose_of":
            outer, inner = self.members
            mid = outer.inverse_many(flat)
            out = inner.eval_many(mid) if self.invert_inner else inner.inverse_many(mid)
        else:
            out = _bisect_inverse_many(self, flat)
        return out.reshape(shape)

    def _inverse_table(self, flat: np.ndarray) -> np.ndarray:
        xs = np.array([r[0] for r in self.table], dtype=float)
        ys = np.array([r[1] for r in self.table], dtype=float)
        out = np.zeros_like(flat)
        nz = flat != 0
        vals = flat[nz]
        if vals.size and (vals.min() < ys[0] * (1 - 1e-12) or vals.max() > ys[-1] * (1 + 1e-12)):
            raise TableRangeError(
                f"tabulated inversion outside range [{ys[0]}, {ys[-1]}]"
            )
        out[nz] = np.exp(np.interp(np.log(vals), np.log(ys), np.log(xs)))
        return out

    # -- conjugation --------------------------------------------------------

    def conjugate(self) -> "YoungFunction":
        return conjugate(self)

    def conjugate_eval(self, y: float) -> float:
        return conjugate_eval(self, y)

    # -- config -------------------------------------------------------------

    def to_config(self) -> dict[str, Any]:
        cfg: dict[str, Any] = {"family": self.family}
        if self.family in _PARAMETRIC:
            cfg["p"] = self.params[0]
        if self.family == "tabulated":
            cfg["table"] = [list(r) for r in self.table]
        if self.family == "conjugate_of":
            cfg["of"] = self.members[0].to_config()
        if self.family == "compose_of":
            cfg["outer"] = self.members[0].to_config()
            cfg["inner"] = self.members[1].to_config()
            cfg["invert_inner"] = self.invert_inner
        return cfg

    def describe(self) -> str:
        if self.family in _PARAMETRIC:
            return f"{self.family}(p={self.params[0]:g})"
        if self.family == "conjugate_of":
            return f"conjugate_of[{self.members[0].describe()}]"
        if self.family == "compose_of":
            op = "∘inv" if self.invert_inner else "∘"
            return f"compose[{self.members[0].describe()} {op} {self.members[1].describe()}]"
        return self.family


def from_config(cfg: Mapping[str, Any], path: str = "young") -> YoungFunction:
    """Build a YoungFunction from its JSON form; errors name the field path."""
    from .errors import ConfigError

    if not isinstance(cfg, Mapping):
        raise ConfigError(f"{path}: expected an object")
    fam = cfg.get("family")
    if fam is None:
        raise ConfigError(f"{path}.family: missing")
    try:
        if fam in _PARAMETRIC:
            if "p" not in cfg:
                raise ConfigError(f"{path}.p: missing for family {fam}")
            return YoungFunction(fam, (float(cfg["p"]),))
        if fam in ("log_quotient", "exp_quartic"):
            return YoungFunction(fam)
        if fam == "tabulated":
            rows = cfg.get("table")
            if not isinstance(rows, list):
                raise ConfigError(f"{path}.table: missing or not a list")
            return YoungFunction(fam, table=tuple((float(a), float(b)) for a, b in rows))
        if fam == "conjugate_of":
            return YoungFunction(fam, members=(from_config(cfg.get("of"), f"{path}.of"),))
        if fam == "compose_of":
            return YoungFunction(
                fam,
                members=(
                    from_config(cfg.get("outer"), f"{path}.outer"),
                    from_config(cfg.get("inner"), f"{path}.inner"),
                ),
                invert_inner=bool(cfg.get("invert_inner", False)),
            )
    except ArgumentError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.family: unknown family {fam!r}")


# -- factories --------------------------------------------------------------


def power(p: float) -> YoungFunction:
    """x^p."""
    return YoungFunction("power", (float(p),))


def power_scaled(p: float) -> YoungFunction:
    """x^p / p; conjugate pair of itself under p -> p'."""
    return YoungFunction("power_scaled", (float(p),))


def exp_power(p: float) -> YoungFunction:
    """e^{x^p} - x^p - 1."""
    return YoungFunction("exp_power", (float(p),))


def entropy(p: float) -> YoungFunction:
    """(1 + x^p) log(1 + x^p) - x^p."""
    return YoungFunction("entropy", (float(p),))


def log_quotient() -> YoungFunction:
    """x^2 / log(e + x)."""
    return YoungFunction("log_quotient")


def exp_quartic() -> YoungFunction:
    """e^{x^4} - 1."""
    return YoungFunction("exp_quartic")


def tabulated(rows: Iterable[tuple[float, float]]) -> YoungFunction:
    return YoungFunction("tabulated", table=tuple((float(a), float(b)) for a, b in rows))


def compose(outer: YoungFunction, inner: YoungFunction, invert_inner: bool = False) -> YoungFunction:
    """outer(inner(x)), or outer(inner^{-1}(x)) with invert_inner."""
    return YoungFunction("compose_of", members=(outer, inner), invert_inner=invert_inner)


def conjugate(phi: YoungFunction) -> YoungFunction:
    """Legendre conjugate.  Closed form for power_scaled (p -> p'), a numeric
    wrapper otherwise.  Wrapping is deliberate: conjugating twice exercises
    the numeric route instead of collapsing to the original object."""
    if phi.family == "power_scaled" and phi.p > 1:
        p = phi.p
        return power_scaled(p / (p - 1.0))
    return YoungFunction("conjugate_of", members=(phi,))


# -- numeric conjugation ----------------------------------------------------


def conjugate_eval(phi: YoungFunction, y: float) -> float:
    """Phi*(y) = sup_{x>=0} (x|y| - Phi(x)) by bracket doubling plus golden
    section; exact closed forms for the power families."""
    return float(conjugate_eval_many(phi, np.array([y], dtype=float))[0])


def conjugate_eval_many(phi: YoungFunction, ys: Iterable[float] | np.ndarray) -> np.ndarray:
    arr = np.abs(np.asarray(ys, dtype=float))
    shape = arr.shape
    y = arr.ravel()
    if phi.family == "power_scaled" and phi.p > 1:
        q = phi.p / (phi.p - 1.0)
        return (np.power(y, q) / q).reshape(shape)
    if phi.family == "power":
        p = phi.p
        if p > 1:
            q = p / (p - 1.0)
            with np.errstate(over="ignore"):
                out = (p - 1.0) * np.power(p, -q) * np.power(y, q)
            return out.reshape(shape)
        if p == 1.0:
            out = np.where(y <= 1.0, 0.0, np.inf)
            return out.reshape(shape)
    out = np.zeros_like(y)
    pos = (y > 0) & np.isfinite(y)
    out[np.isinf(y)] = np.inf
    if pos.any():
        out[pos] = _golden_sup(phi, y[pos])
    return out.reshape(shape)


def _golden_sup(phi: YoungFunction, yv: np.ndarray) -> np.ndarray:
    """Vectorized sup_x (x*y - Phi(x)) for strictly positive finite y."""

    def g(x: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            val = x * yv - phi.eval_many(x)
        return np.where(np.isnan(val), -np.inf, val)

    n = yv.size
    hi = np.ones(n)
    ghi = g(hi)
    rising = np.ones(n, dtype=bool)
    for _ in range(1100):
        if not rising.any():
            break
        cand = np.where(rising, hi * 2.0, hi)
        gc = g(cand)
        grow = rising & (gc >= ghi) & (hi < 1e300)
        hi = np.where(grow, cand, hi)
        ghi = np.where(grow, gc, ghi)
        rising = grow
    if rising.any():
        raise NumericError("conjugate bracket expansion did not terminate")
    blown = np.isinf(ghi) & (ghi > 0)

    a = np.zeros(n)
    b = np.minimum(hi * 2.0, 1e300)
    w = b - a
    c = b - _INVPHI * w
    d = a + _INVPHI * w
    gc, gd = g(c), g(d)
    for _ in range(MAX_ITER):
        if np.all((b - a) <= SUP_WIDTH_TOL * b + 1e-300):
            break
        left = gc >= gd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        w = b - a
        c = b - _INVPHI * w
        d = a + _INVPHI * w
        gc, gd = g(c), g(d)
    best = np.maximum(np.maximum(gc, gd), g(0.5 * (a + b)))
    best = np.maximum(best, 0.0)
    best[blown] = np.inf
    return best


def _conjugate_inverse_many(phi: YoungFunction, av: np.ndarray) -> np.ndarray:
    """(Phi*)^{-1}(a) = inf_{x>0} (a + Phi(x)) / x, solved by golden section.

    The identity avoids nesting a bisection over numeric conjugate
    evaluations; the objective is unimodal for convex Phi."""
    out = np.zeros_like(av)
    out[np.isinf(av)] = np.inf
    sel = (av > 0) & np.isfinite(av)
    if not sel.any():
        return out
    a_val = av[sel]

    def obj(x: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            val = (a_val + phi.eval_many(x)) / x
        return np.where(np.isnan(val), np.inf, val)

    n = a_val.size
    lo = np.full(n, 1.0)
    hi = np.full(n, 1.0)
    flo = obj(lo)
    fhi = flo.copy()
    for _ in range(1100):
        cand = lo / 2.0
        fc = obj(cand)
        shrink = (fc < flo) & (lo > 1e-300)
        if not shrink.any():
            break
        lo = np.where(shrink, cand, lo)
        flo = np.where(shrink, fc, flo)
    for _ in range(1100):
        cand = hi * 2.0
        fc = obj(cand)
        grow = (fc < fhi) & (hi < 1e300)
        if not grow.any():
            break
        hi = np.where(grow, cand, hi)
        fhi = np.where(grow, fc, fhi)
    a = lo / 2.0
    b = hi * 2.0
    w = b - a
    c = b - _INVPHI * w
    d = a + _INVPHI * w
    fc, fd = obj(c), obj(d)
    for _ in range(MAX_ITER):
        if np.all((b - a) <= SUP_WIDTH_TOL * b + 1e-300):
            break
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        w = b - a
        c = b - _INVPHI * w
        d = a + _INVPHI * w
        fc, fd = obj(c), obj(d)
    out[sel] = np.minimum(np.minimum(fc, fd), obj(0.5 * (a + b)))
    return out


def _bisect_inverse_many(phi: YoungFunction, flat: np.ndarray) -> np.ndarray:
    """Generic monotone inverse by bracket doubling plus bisection."""
    out = np.zeros_like(flat)
    out[np.isinf(flat)] = np.inf
    sel = (flat > 0) & np.isfinite(flat)
    if not sel.any():
        return out
    y = flat[sel]
    n = y.size
    hi = np.ones(n)
    vals = phi.eval_many(hi)
    for _ in range(1100):
        need = vals < y
        if not need.any():
            break
        hi = np.where(need, hi * 2.0, hi)
        if np.any(hi > 1e300):
            raise NumericError("inverse bracket expansion did not terminate")
        vals = phi.eval_many(hi)
    lo = np.zeros(n)
    for _ in range(MAX_ITER):
        if np.all((hi - lo) <= REL_TOL * np.maximum(hi, 1e-300)):
            break
        mid = 0.5 * (lo + hi)
        vm = phi.eval_many(mid)
        below = vm < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out[sel] = 0.5 * (lo + hi)
    return out


# -- growth conditions ------------------------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    """Grid-certified verdict for one growth condition.

    ``witness_constant`` reproduces the defining inequality at every grid
    point (pair) past ``threshold_x0``; ``threshold_x0`` is 0 when the
    condition certified globally and None when nothing certified.
    """

    condition: str
    holds_globally: bool
    holds_eventually: bool
    witness_constant: float
    threshold_x0: float | None
    grid: tuple[float, ...]
    details: dict[str, Any] = field(default_factory=dict)


def _suffix_profile_scalar(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """suffix_max[i] = max(r[i:]), suffix_ok[i] = all finite(r[i:])."""
    n = r.size
    smax = np.empty(n)
    sok = np.empty(n, dtype=bool)
    cur = -np.inf
    ok = True
    for i in range(n - 1, -1, -1):
        v = r[i]
        if not np.isfinite(v):
            ok = False
        else:
            cur = max(cur, v)
        smax[i] = cur
        sok[i] = ok
    return smax, sok


def _suffix_profile_matrix(R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Suffix stats over the square sub-blocks R[i:, i:]."""
    n = R.shape[0]
    smax = np.empty(n)
    sok = np.empty(n, dtype=bool)
    cur = -np.inf
    ok = True
    for i in range(n - 1, -1, -1):
        row = R[i, i:]
        col = R[i:, i]
        chunk = np.concatenate([row, col])
        if not np.all(np.isfinite(chunk)):
            ok = False
            finite = chunk[np.isfinite(chunk)]
            if finite.size:
                cur = max(cur, float(finite.max()))
        else:
            cur = max(cur, float(chunk.max()))
        smax[i] = cur
        sok[i] = ok
    return smax, sok


def _decide(condition: str, grid: np.ndarray, smax: np.ndarray, sok: np.ndarray,
            details: dict[str, Any]) -> GrowthReport:
    n = grid.size
    mid = n // 2
    head_blowup = bool(
        sok[0]
        and smax[mid] > 0
        and np.isfinite(smax[0])
        and smax[0] > 10.0 * smax[mid]
    )
    holds_globally = bool(sok[0] and smax[0] <= RATIO_CEILING and not head_blowup)
    if holds_globally:
        return GrowthReport(condition, True, True, float(smax[0]), 0.0,
                            tuple(grid), details)
    # eventual certification needs a clean tail half
    if sok[mid] and smax[mid] <= RATIO_CEILING:
        w = float(smax[mid])
        i0 = mid
        for i in range(mid - 1, -1, -1):
            if sok[i] and smax[i] <= w * (1 + 1e-9):
                i0 = i
            else:
                break
        return GrowthReport(condition, False, True, w, float(grid[i0]),
                            tuple(grid), details)
    finite = smax[np.isfinite(smax)]
    witness = float(finite.max()) if finite.size else math.inf
    return GrowthReport(condition, False, False, witness, None, tuple(grid), details)


def check_growth(
    phi: YoungFunction,
    condition: str,
    grid: np.ndarray | None = None,
    psi: YoungFunction | None = None,
) -> GrowthReport:
    """Certify a growth condition on the grid.

    delta2:      phi(2x) <= k phi(x)
    delta-prime: phi(xy) <= c phi(x) phi(y)
    nabla-prime: phi(x) phi(y) <= phi(b x y)
    precedes:    psi(x) <= phi(a x)  (argument ordering: psi before phi)
    """
    if condition not in GROWTH_CONDITIONS:
        raise ArgumentError(f"unknown growth condition {condition!r}")
    g = standard_grid() if grid is None else np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 8 or np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise ArgumentError("grid must be a positive increasing vector with >= 8 points")
    details: dict[str, Any] = {"phi": phi.describe()}
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if condition == "delta2":
            r = phi.eval_many(2.0 * g) / phi.eval_many(g)
            smax, sok = _suffix_profile_scalar(r)
        elif condition == "precedes":
            if psi is None:
                raise ArgumentError("precedes requires psi")
            details["psi"] = psi.describe()
            r = _inverse_or_inf(phi, psi.eval_many(g)) / g
            smax, sok = _suffix_profile_scalar(r)
        elif condition == "delta-prime":
            X, Y = np.meshgrid(g, g, indexing="ij")
            R = phi.eval_many(X * Y) / (phi.eval_many(X) * phi.eval_many(Y))
            smax, sok = _suffix_profile_matrix(R)
        else:  # nabla-prime
            X, Y = np.meshgrid(g, g, indexing="ij")
            prod = phi.eval_many(X) * phi.eval_many(Y)
            R = _inverse_or_inf(phi, prod) / (X * Y)
            smax, sok = _suffix_profile_matrix(R)
    return _decide(condition, g, smax, sok, details)


def _inverse_or_inf(phi: YoungFunction, vals: np.ndarray) -> np.ndarray:
    """Inverse that maps non-finite inputs to inf instead of raising."""
    vals = np.asarray(vals, dtype=float)
    out = np.full(vals.shape, np.inf)
    ok = np.isfinite(vals)
    if ok.any():
        try:
            out[ok] = phi.inverse_many(vals[ok])
        except NumericError:
            flat = vals[ok]
            res = np.empty_like(flat)
            for i, v in enumerate(flat):
                try:
                    res[i] = phi.inverse(v)
                except NumericError:
                    res[i] = np.inf
            out[ok] = res
    return out


# -- Young validity ---------------------------------------------------------


@dataclass(frozen=True)
class CompositionCheck:
    """Outcome of a grid-level Young-validity check."""

    is_young: bool
    failures: tuple[str, ...]
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.is_young


def validate_young(phi: YoungFunction, grid: np.ndarray | None = None) -> CompositionCheck:
    """Grid-level check that phi behaves like a Young function: vanishes at 0,
    positive, midpoint convex and superlinear on the grid."""
    g = standard_grid() if grid is None else np.asarray(grid, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = phi.eval_many(g)
        zero_val = phi.eval(0.0)
    return _validate_values(phi, g, vals, zero_val)


def _validate_values(phi: YoungFunction, g: np.ndarray, vals: np.ndarray,
                     zero_val: float) -> CompositionCheck:
    failures: list[str] = []
    details: dict[str, Any] = {}
    if not abs(zero_val) <= 1e-12:
        failures.append("zero-at-zero")
        details["zero_value"] = zero_val
    finite = np.isfinite(vals)
    bad_pos = (vals <= 0) & finite & (g > 0)
    if bad_pos.any():
        failures.append("positivity")
        details["positivity_at"] = float(g[np.argmax(bad_pos)])
    with np.errstate(over="ignore", invalid="ignore"):
        mids = phi.eval_many(0.5 * (g[:-1] + g[1:]))
        rhs = 0.5 * (vals[:-1] + vals[1:])
    ok = np.isfinite(mids) & np.isfinite(rhs)
    tol = 1e-9 * np.maximum(1.0, np.abs(rhs))
    conv_bad = ok & (mids > rhs + tol)
    if conv_bad.any():
        failures.append("convexity")
        details["convexity_at"] = float(g[:-1][np.argmax(conv_bad)])
    slopes = np.where(finite, vals / g, np.inf)
    head = slopes[np.isfinite(slopes)][0] if np.any(np.isfinite(slopes)) else np.nan
    tail = slopes[-1]
    if not (tail > head * (1.0 + 1e-6)):
        failures.append("superlinearity")
        details["slope_head"] = float(head)
        details["slope_tail"] = float(tail) if np.isfinite(tail) else math.inf
    return CompositionCheck(not failures, tuple(failures), details)


def is_young_composition(
    outer: YoungFunction,
    inner_inverse_of: YoungFunction,
    grid: np.ndarray | None = None,
) -> CompositionCheck:
    """Check whether x -> outer(inner^{-1}(x)) is a Young function at grid
    resolution.  Used for ordering hypotheses built from conjugate pairs."""
    g = standard_grid() if grid is None else np.asarray(grid, dtype=float)
    theta = compose(outer, inner_inverse_of, invert_inner=True)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = theta.eval_many(g)
        zero_val = theta.eval(0.0)
    return _validate_values(theta, g, vals, zero_val)

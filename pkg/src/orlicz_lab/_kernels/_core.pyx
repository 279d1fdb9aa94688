# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the closed-form Young families.

Semantics mirror ``_fallback.py``: same family codes, same series cutoffs,
same bracketing logic, so the two backends agree to near machine precision.
"""

from libc.math cimport expm1, log, log1p, pow, INFINITY, M_E, isfinite

import numpy as np

BACKEND_NAME = "compiled"

FAM_POWER = 0
FAM_POWER_SCALED = 1
FAM_EXP_POWER = 2
FAM_ENTROPY = 3
FAM_LOG_QUOTIENT = 4
FAM_EXP_QUARTIC = 5

cdef double _EXP_OVERFLOW = 709.0
cdef double _SERIES_CUT = 1e-3


cdef inline double c_exprel2(double t) nogil:
    if t < _SERIES_CUT:
        return t * t * (0.5 + t * (1.0 / 6 + t * (1.0 / 24 + t * (1.0 / 120 + t * (1.0 / 720 + t / 5040)))))
    if t >= _EXP_OVERFLOW:
        return INFINITY
    return expm1(t) - t


cdef inline double c_entln(double s) nogil:
    if s < _SERIES_CUT:
        return s * s * (0.5 + s * (-1.0 / 6 + s * (1.0 / 12 + s * (-1.0 / 20 + s * (1.0 / 30 - s / 42)))))
    if s == INFINITY:
        return INFINITY
    return (1.0 + s) * log1p(s) - s


cdef inline double c_eval(int fam, double p, double x) nogil:
    cdef double t
    if fam == 0:
        return pow(x, p)
    elif fam == 1:
        return pow(x, p) / p
    elif fam == 2:
        return c_exprel2(pow(x, p))
    elif fam == 3:
        return c_entln(pow(x, p))
    elif fam == 4:
        return x * x / log(M_E + x)
    elif fam == 5:
        t = pow(x, 4)
        if t >= _EXP_OVERFLOW:
            return INFINITY
        return expm1(t)
    return -1.0


def eval_family(int fam, double p, x):
    """Elementwise family evaluation; accepts any-shape float64 array."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    shape = arr.shape
    flat = arr.ravel()
    out = np.empty_like(flat)
    cdef double[::1] xin = flat
    cdef double[::1] xout = out
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            xout[i] = c_eval(fam, p, xin[i])
    return out.reshape(shape)


cdef double c_modular(int fam, double p, double[::1] absf, double[::1] mass) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i, n = absf.shape[0]
    for i in range(n):
        acc += c_eval(fam, p, absf[i]) * mass[i]
        if not isfinite(acc):
            return INFINITY
    return acc


def modular_weighted(int fam, double p, absf, mass):
    cdef double[::1] fv = np.ascontiguousarray(absf, dtype=np.float64)
    cdef double[::1] mv = np.ascontiguousarray(mass, dtype=np.float64)
    cdef double r
    with nogil:
        r = c_modular(fam, p, fv, mv)
    return r


cdef double c_modular_scaled(int fam, double p, double[::1] absf, double[::1] mass, double k) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i, n = absf.shape[0]
    for i in range(n):
        acc += c_eval(fam, p, absf[i] / k) * mass[i]
        if not isfinite(acc):
            return INFINITY
    return acc


def lux_norm_family(int fam, double p, absf, mass, double rel_tol, int max_iter):
    """Luxemburg-norm bisection; returns (value, modular_at_value, iterations)."""
    cdef double[::1] fv = np.ascontiguousarray(absf, dtype=np.float64)
    cdef double[::1] mv = np.ascontiguousarray(mass, dtype=np.float64)
    cdef Py_ssize_t i, n = fv.shape[0]
    cdef double top = 0.0
    for i in range(n):
        if fv[i] > top:
            top = fv[i]
    if top == 0.0:
        return 0.0, 0.0, 0
    cdef double hi = top, lo, mid
    cdef int iterations = 0, it = 0
    with nogil:
        while c_modular_scaled(fam, p, fv, mv, hi) > 1.0:
            hi *= 2.0
            iterations += 1
            if iterations > 1100:
                break
        lo = hi / 2.0 if hi > top else top
        while lo > 0.0 and c_modular_scaled(fam, p, fv, mv, lo) <= 1.0:
            lo /= 2.0
            iterations += 1
            if lo < 1e-300:
                lo = 0.0
                break
        while it < max_iter and (hi - lo) > rel_tol * hi:
            mid = 0.5 * (lo + hi)
            if c_modular_scaled(fam, p, fv, mv, mid) > 1.0:
                lo = mid
            else:
                hi = mid
            it += 1
    if iterations > 1100:
        raise OverflowError("luxemburg bracket expansion failed")
    return hi, c_modular_scaled(fam, p, fv, mv, hi), iterations + it

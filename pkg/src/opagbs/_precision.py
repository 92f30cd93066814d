"""Switching between float64 and mpmath-backed object arrays.

Deep OPA networks amplify quadrature variances by ``exp(2 r d)``; the small
partial-transpose symplectic eigenvalues are then lost in double precision.
Every numerical routine therefore accepts ``dps`` (decimal digits).  ``None``
means plain float64; an integer means numpy object arrays of ``mpmath.mpf``
evaluated inside ``mpmath.workdps(dps)``.
"""
from __future__ import annotations

import math
from contextlib import nullcontext

import mpmath
import numpy as np

# float64 is trusted while the largest covariance eigenvalue stays below this
FLOAT_NORM_LIMIT = 30.0


def workdps(dps):
    """Context manager setting the mpmath working precision (no-op for float64)."""
    return mpmath.workdps(dps) if dps else nullcontext()


def lib(dps):
    """Scalar math namespace: numpy for float64, mpmath otherwise."""
    return mpmath if dps else np


def asarray(a, dps=None, complex_=False):
    """Convert ``a`` to float64/complex128, or to an mpf/mpc object array."""
    if not dps:
        return np.asarray(a, dtype=complex if complex_ else float)
    conv = mpmath.mpc if complex_ else mpmath.mpf
    arr = np.asarray(a)
    out = np.empty(arr.shape, dtype=object)
    with mpmath.workdps(dps):
        for idx, v in np.ndenumerate(arr):
            if isinstance(v, (mpmath.mpf, mpmath.mpc)) and not complex_:
                out[idx] = v
            else:
                out[idx] = conv(v)
    return out


def eye(size, dps=None):
    if not dps:
        return np.eye(size)
    out = np.full((size, size), mpmath.mpf(0), dtype=object)
    for i in range(size):
        out[i, i] = mpmath.mpf(1)
    return out


def zeros(shape, dps=None):
    if not dps:
        return np.zeros(shape)
    return np.full(shape, mpmath.mpf(0), dtype=object)


def to_float(a):
    a = np.asarray(a)
    if a.dtype != object:
        return a.astype(float) if not np.iscomplexobj(a) else a
    if any(isinstance(v, mpmath.mpc) for v in a.flat):
        return a.astype(complex)
    return a.astype(float)


def real_part(a):
    """Real part of an array that may hold mpc objects."""
    a = np.asarray(a)
    if a.dtype != object:
        return a.real
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = v.real if isinstance(v, mpmath.mpc) else v
    return out


def conj(a):
    a = np.asarray(a)
    if a.dtype != object:
        return a.conj()
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = v.conjugate() if isinstance(v, mpmath.mpc) else v
    return out


def dps_for_norm(norm: float) -> int | None:
    """Working precision needed to resolve symplectic eigenvalues of a state.

    Symplectic-eigenvalue errors grow roughly like ``eps * norm**3``, so three
    digits are reserved per decade of ``norm`` on top of a 25-digit floor.
    """
    if not np.isfinite(norm):
        raise OverflowError("covariance norm overflowed float64")
    if norm <= FLOAT_NORM_LIMIT:
        return None
    return 25 + math.ceil(3 * math.log10(norm))

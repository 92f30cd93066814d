"""Hafnians of symmetric matrices.

Two algorithms share one entry convention: the matrix must be square, of even
dimension and symmetric.  :func:`hafnian_bruteforce` sums the perfect
matchings directly and is the oracle; :func:`hafnian_fast` uses the
power-trace formula, summing ``2**k`` subset terms for a ``2k x 2k`` matrix.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .exceptions import ResourceLimitError

BRUTE_MAX_DIM = 12
FAST_MAX_DIM = 40
SYMMETRY_TOL = 1e-12
_CHUNK = 4096


def _validated(m, max_dim: int) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"hafnian needs a square matrix, got shape {a.shape}")
    if a.shape[0] % 2:
        raise ValueError(
            f"hafnian of odd dimension {a.shape[0]} has no perfect matching; "
            "treat the value as 0 at the call site"
        )
    if a.shape[0] > max_dim:
        raise ResourceLimitError(f"dimension {a.shape[0]} exceeds the cap of {max_dim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    if a.size:
        scale = max(1.0, float(np.max(np.abs(a))))
        if np.max(np.abs(a - a.T)) > SYMMETRY_TOL * scale:
            raise ValueError("hafnian needs a symmetric matrix")
    dtype = complex if np.iscomplexobj(a) else float
    return a.astype(dtype)


def hafnian_bruteforce(m) -> complex | float:
    """Sum over all perfect matchings, pairing the first free index each time.

    Examples
    --------
    >>> hafnian_bruteforce(np.array([[0.0, 2.5], [2.5, 0.0]]))
    2.5
    """
    a = _validated(m, BRUTE_MAX_DIM)

    def rec(idx: tuple[int, ...]):
        if not idx:
            return 1.0
        first, rest = idx[0], idx[1:]
        total = 0.0
        for k, j in enumerate(rest):
            total += a[first, j] * rec(rest[:k] + rest[k + 1:])
        return total

    out = rec(tuple(range(a.shape[0])))
    return complex(out) if np.iscomplexobj(a) else float(out)


def _power_traces(mats: np.ndarray, k: int) -> np.ndarray:
    """``tr(M^j)`` for ``j = 1..k`` over a stack of matrices, shape ``(batch, k)``."""
    # repeated products keep integer matrices exact, unlike an eigensolve
    out = np.empty((mats.shape[0], k), dtype=mats.dtype)
    power = mats
    for j in range(k):
        if j:
            power = power @ mats
        out[:, j] = np.trace(power, axis1=1, axis2=2)
    return out


def _exp_coefficient(traces: np.ndarray, k: int) -> np.ndarray:
    """Coefficient of ``x^k`` in ``exp(sum_j tr(M^j) x^j / (2j))``, batched."""
    coeff = [np.ones(traces.shape[0], dtype=traces.dtype)]
    for m in range(1, k + 1):
        acc = sum(traces[:, j - 1] * coeff[m - j] for j in range(1, m + 1))
        coeff.append(acc / (2 * m))
    return coeff[k]


def _compensated(values: np.ndarray):
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


def hafnian_fast(m) -> complex | float:
    """Power-trace Hafnian, exact up to floating-point error.

    ``haf(A) = sum_S (-1)^(k-|S|) f(X A_S)`` where ``S`` runs over subsets of
    the ``k`` index pairs ``(2i, 2i+1)``, ``A_S`` keeps the rows and columns of
    the chosen pairs, ``X`` swaps the members of each pair and ``f`` is the
    ``x^k`` coefficient of ``exp(sum_j tr((X A_S)^j) x^j / (2j))``.

    Subsets of equal size are batched through stacked matrix products; the
    outer sum uses compensated (``math.fsum``) accumulation.

    Parameters
    ----------
    m : array_like
        Symmetric matrix of even dimension at most 40, real or complex.

    Returns
    -------
    float or complex
        ``float`` for real input.
    """
    a = _validated(m, FAST_MAX_DIM)
    size = a.shape[0]
    if size == 0:
        return 1.0
    k = size // 2
    swapped = a.reshape(k, 2, size)[:, ::-1, :].reshape(size, size)
    terms = []
    for s in range(1, k + 1):
        sign = -1.0 if (k - s) % 2 else 1.0
        subsets = np.array(list(combinations(range(k), s)), dtype=np.intp)
        for start in range(0, len(subsets), _CHUNK):
            chunk = subsets[start:start + _CHUNK]
            idx = np.stack([2 * chunk, 2 * chunk + 1], axis=2).reshape(len(chunk), 2 * s)
            mats = swapped[idx[:, :, None], idx[:, None, :]]
            terms.append(sign * _exp_coefficient(_power_traces(mats, k), k))
    return _compensated(np.concatenate(terms))


def hafnian(m, algorithm: str = "fast"):
    """Dispatch on ``algorithm`` (``"fast"`` or ``"brute"``)."""
    if algorithm == "fast":
        return hafnian_fast(m)
    if algorithm == "brute":
        return hafnian_bruteforce(m)
    raise ValueError(f"unknown hafnian algorithm {algorithm!r}")

"""Gaussian states, symplectic algebra and basis conversions.

Conventions used throughout the package:

* quadrature ordering is ``XXPP`` internally, ``(x_1..x_n, p_1..p_n)``;
  ``XPXP`` only appears at I/O boundaries;
* vacuum covariance is the identity, so physical states have all symplectic
  eigenvalues ``>= 1``;
* complex basis vectors are ``(a_1..a_n, a_1^dag..a_n^dag)`` with
  ``a = (x + i p) / sqrt(2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _precision as prec

SYMMETRY_TOL = 1e-12
IMAG_TOL = 1e-9


class QuadratureOrdering(str, enum.Enum):
    XXPP = "xxpp"
    XPXP = "xpxp"

    def other(self) -> "QuadratureOrdering":
        return QuadratureOrdering.XPXP if self is QuadratureOrdering.XXPP else QuadratureOrdering.XXPP


def _check_modes(n):
    if int(n) != n or n < 1:
        raise ValueError(f"mode count must be a positive integer, got {n!r}")
    return int(n)


def ordering_permutation(n: int) -> np.ndarray:
    """Index array ``perm`` with ``v_xpxp = v_xxpp[perm]``."""
    n = _check_modes(n)
    perm = np.empty(2 * n, dtype=int)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n) + n
    return perm


def convert_ordering(m: np.ndarray, source, target) -> np.ndarray:
    """Re-index a 2n x 2n matrix (or 2n vector) between quadrature orderings."""
    source, target = QuadratureOrdering(source), QuadratureOrdering(target)
    m = np.asarray(m)
    if source is target:
        return m.copy()
    if m.shape[0] % 2:
        raise ValueError("quadrature matrices have even dimension")
    perm = ordering_permutation(m.shape[0] // 2)
    if source is QuadratureOrdering.XPXP:
        perm = np.argsort(perm)
    if m.ndim == 1:
        return m[perm]
    return m[np.ix_(perm, perm)]


def symplectic_form(n: int, ordering=QuadratureOrdering.XXPP) -> np.ndarray:
    """Integer-valued symplectic form Omega for ``n`` modes."""
    n = _check_modes(n)
    ordering = QuadratureOrdering(ordering)
    if ordering is QuadratureOrdering.XXPP:
        eye = np.eye(n, dtype=int)
        zero = np.zeros((n, n), dtype=int)
        return np.block([[zero, eye], [-eye, zero]])
    return np.kron(np.eye(n, dtype=int), np.array([[0, 1], [-1, 0]]))


def _symmetrize(m, dps):
    with prec.workdps(dps):
        return (m + m.T) / 2


def _frozen(a):
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """Zero-mean n-mode Gaussian state.

    ``sigma`` is float64, or an mpf object array when ``dps`` is set.
    """

    n: int
    sigma: np.ndarray
    ordering: QuadratureOrdering = QuadratureOrdering.XXPP
    dps: int | None = None

    def __post_init__(self):
        n = _check_modes(self.n)
        sigma = prec.asarray(self.sigma, self.dps)
        if sigma.shape != (2 * n, 2 * n):
            raise ValueError(f"sigma must be {2 * n}x{2 * n}, got {sigma.shape}")
        asym = np.max(np.abs(prec.to_float(sigma - sigma.T))) if n else 0.0
        scale = max(1.0, float(np.max(np.abs(prec.to_float(sigma)))))
        if asym > 1e-8 * scale:
            raise ValueError(f"sigma is not symmetric (max asymmetry {asym:.3g})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "ordering", QuadratureOrdering(self.ordering))
        object.__setattr__(self, "sigma", _frozen(_symmetrize(sigma, self.dps)))

    def to_ordering(self, ordering) -> "CovarianceState":
        return CovarianceState(self.n, convert_ordering(self.sigma, self.ordering, ordering), ordering, self.dps)

    def with_precision(self, dps) -> "CovarianceState":
        return CovarianceState(self.n, self.sigma if dps else prec.to_float(self.sigma), self.ordering, dps)

    def as_float(self) -> np.ndarray:
        return prec.to_float(self.sigma)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    n: int
    m: np.ndarray
    ordering: QuadratureOrdering = QuadratureOrdering.XXPP
    dps: int | None = None

    def __post_init__(self):
        n = _check_modes(self.n)
        m = prec.asarray(self.m, self.dps)
        if m.shape != (2 * n, 2 * n):
            raise ValueError(f"symplectic matrix must be {2 * n}x{2 * n}, got {m.shape}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "ordering", QuadratureOrdering(self.ordering))
        object.__setattr__(self, "m", _frozen(m))

    def residual(self) -> float:
        """Frobenius norm of ``S Omega S^T - Omega``."""
        omega = symplectic_form(self.n, self.ordering)
        with prec.workdps(self.dps):
            diff = self.m @ omega @ self.m.T - omega
        return float(np.linalg.norm(prec.to_float(diff)))

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        if other.n != self.n or other.ordering is not self.ordering:
            raise ValueError("symplectic matrices act on different mode sets")
        dps = max(self.dps or 0, other.dps or 0) or None
        with prec.workdps(dps):
            m = self.m @ other.m
        return SymplecticMatrix(self.n, m, self.ordering, dps)

    def to_ordering(self, ordering) -> "SymplecticMatrix":
        return SymplecticMatrix(self.n, convert_ordering(self.m, self.ordering, ordering), ordering, self.dps)

    @classmethod
    def identity(cls, n, dps=None):
        return cls(n, prec.eye(2 * n, dps), dps=dps)


@dataclass(frozen=True, eq=False)
class ComplexTransform:
    """Quadrature-to-ladder change of basis ``(x, p) -> (a, a^dag)``."""

    n: int
    t: np.ndarray

    @classmethod
    def for_modes(cls, n: int) -> "ComplexTransform":
        n = _check_modes(n)
        eye = np.eye(n)
        t = np.block([[eye, 1j * eye], [eye, -1j * eye]]) / np.sqrt(2)
        return cls(n, t)

    def mp(self, dps) -> np.ndarray:
        """The same matrix as mpc objects at ``dps`` digits."""
        with mpmath.workdps(dps):
            s = 1 / mpmath.sqrt(2)
            out = np.full((2 * self.n, 2 * self.n), mpmath.mpc(0), dtype=object)
            for k in range(self.n):
                out[k, k] = out[self.n + k, k] = mpmath.mpc(s)
                out[k, self.n + k] = mpmath.mpc(0, s)
                out[self.n + k, self.n + k] = mpmath.mpc(0, -s)
        return out


def vacuum_state(n: int, dps=None) -> CovarianceState:
    n = _check_modes(n)
    return CovarianceState(n, prec.eye(2 * n, dps), dps=dps)


def thermal_state(nbar, dps=None) -> CovarianceState:
    """Product of thermal states; ``nbar`` is the mean photon number per mode."""
    nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
    diag = np.concatenate([2 * nbar + 1, 2 * nbar + 1])
    return CovarianceState(len(nbar), np.diag(diag), dps=dps)


def apply_symplectic(state: CovarianceState, s: SymplecticMatrix) -> CovarianceState:
    """``sigma -> S sigma S^T``."""
    if s.n != state.n:
        raise ValueError(f"symplectic acts on {s.n} modes, state has {state.n}")
    if s.ordering is not state.ordering:
        s = s.to_ordering(state.ordering)
    dps = max(state.dps or 0, s.dps or 0) or None
    sigma = state.sigma if dps == state.dps else prec.asarray(state.sigma, dps)
    with prec.workdps(dps):
        out = s.m @ sigma @ s.m.T
    return CovarianceState(state.n, out, state.ordering, dps)


def symplectic_eigenvalues(state: CovarianceState) -> np.ndarray:
    """Ascending symplectic eigenvalues (``n`` values) as float64.

    Float64 states use the spectrum of ``i Omega sigma``.  Extended-precision
    states go through the Cholesky factor ``sigma = L L^T``: the symplectic
    eigenvalues are the singular values of the antisymmetric ``L^T Omega L``,
    obtained from a symmetric eigensolve.
    """
    omega = symplectic_form(state.n, state.ordering)
    if state.dps:
        return _symplectic_eigenvalues_mp(state.sigma, omega, state.dps)
    sigma = state.sigma
    scale = max(1.0, float(np.max(np.abs(sigma))))
    if np.max(np.abs(sigma - sigma.T)) > SYMMETRY_TOL * scale:
        raise ValueError("sigma is not symmetric")
    ev = np.linalg.eigvals(1j * omega @ sigma)
    if np.max(np.abs(ev.imag)) > IMAG_TOL * scale:
        raise ValueError("i*Omega*sigma has complex eigenvalues; sigma is not positive definite")
    nu = np.sort(np.abs(ev.real))
    return (nu[0::2] + nu[1::2]) / 2


def _symplectic_spectrum_mp(sigma, omega):
    """mpf symplectic eigenvalues; call inside ``mpmath.workdps``."""
    size = sigma.shape[0]
    chol = mpmath.cholesky(mpmath.matrix(sigma.tolist()))
    lower = np.array(chol.tolist(), dtype=object)
    k = lower.T @ omega @ lower
    ev = mpmath.eigsy(mpmath.matrix((k.T @ k).tolist()), eigvals_only=True)
    vals = sorted(mpmath.sqrt(abs(ev[i])) for i in range(size))
    return [(vals[i] + vals[i + 1]) / 2 for i in range(0, size, 2)]


def _symplectic_eigenvalues_mp(sigma, omega, dps):
    with mpmath.workdps(dps):
        return np.array([float(v) for v in _symplectic_spectrum_mp(sigma, omega)])


def log_symplectic_eigenvalues(state: CovarianceState) -> np.ndarray:
    """Natural logs of the symplectic eigenvalues, taken before rounding to float."""
    if not state.dps:
        return np.log(symplectic_eigenvalues(state))
    omega = symplectic_form(state.n, state.ordering)
    with mpmath.workdps(state.dps):
        return np.array([float(mpmath.log(v)) for v in _symplectic_spectrum_mp(state.sigma, omega)])


def is_physical(state: CovarianceState, tol: float = 1e-9) -> bool:
    return bool(np.min(symplectic_eigenvalues(state)) >= 1 - tol)


def purity(state: CovarianceState) -> float:
    """``1 / prod(nu_k)``; equals 1 for pure states."""
    return float(np.exp(-np.sum(log_symplectic_eigenvalues(state))))


def quad_to_complex(m: np.ndarray, dps=None) -> np.ndarray:
    """``T m T^dag``: a quadrature-basis (XXPP) matrix in the ladder basis."""
    t = _transform(m, dps)
    with prec.workdps(dps):
        return t @ m @ prec.conj(t).T


def complex_to_quad(m: np.ndarray, dps=None) -> np.ndarray:
    """Inverse of :func:`quad_to_complex`: ``T^dag m T``."""
    t = _transform(m, dps)
    with prec.workdps(dps):
        return prec.conj(t).T @ m @ t


def _transform(m, dps):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even dimension, got shape {m.shape}")
    ct = ComplexTransform.for_modes(m.shape[0] // 2)
    return ct.mp(dps) if dps else ct.t


def two_mode_squeezer_xpxp(r: float) -> np.ndarray:
    """``[[cosh r I, sinh r Z], [sinh r Z, cosh r I]]`` on ``(x1, p1, x2, p2)``."""
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    return np.block([[np.cosh(r) * eye, np.sinh(r) * z], [np.sinh(r) * z, np.cosh(r) * eye]])


def bloch_messiah_two_mode(r: float) -> tuple[SymplecticMatrix, SymplecticMatrix]:
    """Passive/active factors ``(B50, D)`` with ``B50 @ D @ B50.T == S(r)``.

    Both matrices are in XPXP ordering.  ``D`` squeezes mode 1 by ``-r`` and
    mode 2 by ``+r``; with the opposite signs the product is ``S(-r)``.
    """
    if not np.isfinite(r):
        raise ValueError("squeezing must be finite")
    eye = np.eye(2)
    b50 = np.block([[eye, eye], [-eye, eye]]) / np.sqrt(2)
    d = np.diag([np.exp(-r), np.exp(r), np.exp(r), np.exp(-r)])
    return (
        SymplecticMatrix(2, b50, QuadratureOrdering.XPXP),
        SymplecticMatrix(2, d, QuadratureOrdering.XPXP),
    )

"""Photon-number statistics of zero-mean Gaussian states via Hafnians.

For a state with quadrature covariance ``sigma`` (vacuum = identity) the
normally ordered ladder moments are ``G = (T sigma T^dag - I) / 2`` in the
``(a, a^dag)`` basis.  With ``Q = G + I`` and ``X = [[0, I], [I, 0]]``::

    W = X G Q^-1,     p(n_1..n_m) = haf W~ / (sqrt(det Q) prod n_k!)

where ``W~`` repeats row/column ``i`` (and its conjugate partner ``m + i``)
``n_i`` times.  Everything here runs in float64 at desk scale.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .exceptions import NumericalError, ResourceLimitError
from .gaussian_core import CovarianceState, quad_to_complex
from .hafnian import hafnian_fast

MAX_PATTERN_TOTAL = 20
MAX_ENUM_MODES = 6
MAX_ENUM_TOTAL = 8
MAX_COND = 1e12
IMAG_WARN = 1e-9
MAX_FOCK_CUTOFF = 25


@dataclass(frozen=True)
class PhotonPattern:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"photon counts must be >= 0, got {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def modes(self) -> int:
        return len(self.counts)

    @property
    def label(self) -> str:
        return ";".join(map(str, self.counts))

    @classmethod
    def parse(cls, text: str) -> "PhotonPattern":
        return cls(tuple(int(v) for v in text.split(";")))


class _Overflow:
    """Sampling outcome standing for all patterns beyond the enumeration budget."""

    label = "overflow"

    def __repr__(self):
        return "OVERFLOW"


OVERFLOW = _Overflow()


@dataclass(frozen=True, eq=False)
class WMatrices:
    """``g`` (normally ordered moments), ``w`` and ``sqrt(det(I + g))``."""

    n: int
    g: np.ndarray
    w: np.ndarray
    normalization: float

    def expanded(self, pattern: PhotonPattern) -> np.ndarray:
        """``W~``: entry ``W_ij`` becomes an ``n_i x n_j`` block, in both halves."""
        if pattern.modes != self.n:
            raise ValueError(f"pattern has {pattern.modes} modes, state has {self.n}")
        rows = np.repeat(np.arange(self.n), pattern.counts)
        idx = np.concatenate([rows, rows + self.n])
        return self.w[np.ix_(idx, idx)]


def build_w(state: CovarianceState) -> WMatrices:
    n = state.n
    if state.ordering != "xxpp":
        state = state.to_ordering("xxpp")
    sigma = state.as_float()
    eye = np.eye(2 * n)
    g = (quad_to_complex(sigma) - eye) / 2
    q = g + eye
    cond = np.linalg.cond(q)
    if not np.isfinite(cond) or cond > MAX_COND:
        raise NumericalError(f"G + I is ill-conditioned (cond = {cond:.3g})")
    swap = np.block([[np.zeros((n, n)), np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    w = swap @ np.linalg.solve(q.T, g.T).T
    w = (w + w.T) / 2
    det = np.linalg.det(q)
    return WMatrices(n, g, w, float(np.sqrt(det.real)))


def pattern_probability(w: WMatrices, pattern: PhotonPattern | Sequence[int]) -> float:
    """Probability of detecting ``pattern`` (real part; large imaginary residue warns)."""
    if not isinstance(pattern, PhotonPattern):
        pattern = PhotonPattern(tuple(pattern))
    if pattern.total > MAX_PATTERN_TOTAL:
        raise ResourceLimitError(
            f"pattern carries {pattern.total} photons; the limit is {MAX_PATTERN_TOTAL}"
        )
    haf = hafnian_fast(w.expanded(pattern))
    denom = w.normalization * math.prod(math.factorial(c) for c in pattern.counts)
    p = complex(haf) / denom
    if abs(p.imag) > IMAG_WARN:
        warnings.warn(f"discarding imaginary part {p.imag:.3g} of pattern {pattern.label}",
                      RuntimeWarning, stacklevel=2)
    return p.real


@dataclass(frozen=True, eq=False)
class Distribution:
    """Enumerated patterns with their probabilities and the unaccounted mass."""

    patterns: tuple[PhotonPattern, ...]
    probabilities: np.ndarray
    residual: float

    def __len__(self):
        return len(self.patterns)

    def items(self) -> Iterator[tuple[PhotonPattern, float]]:
        return zip(self.patterns, self.probabilities.tolist())

    def probability(self, counts) -> float:
        target = PhotonPattern(tuple(counts))
        for p, v in self.items():
            if p == target:
                return v
        raise KeyError(target.label)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["pattern", "probability"])
            for p, v in self.items():
                writer.writerow([p.label, repr(v)])
            writer.writerow([OVERFLOW.label, repr(self.residual)])


def patterns_up_to(modes: int, max_total: int) -> list[PhotonPattern]:
    """All patterns with at most ``max_total`` photons, by total then lexicographically."""
    combos = (c for c in product(range(max_total + 1), repeat=modes) if sum(c) <= max_total)
    return [PhotonPattern(c) for c in sorted(combos, key=lambda c: (sum(c), c))]


def enumerate_distribution(w: WMatrices, max_total: int) -> Distribution:
    if w.n > MAX_ENUM_MODES:
        raise ResourceLimitError(f"enumeration supports at most {MAX_ENUM_MODES} modes, got {w.n}")
    if not 0 <= max_total <= MAX_ENUM_TOTAL:
        raise ResourceLimitError(f"max_total must lie in 0..{MAX_ENUM_TOTAL}, got {max_total}")
    patterns = patterns_up_to(w.n, max_total)
    probs = np.array([pattern_probability(w, p) for p in patterns])
    residual = 1.0 - math.fsum(probs)
    return Distribution(tuple(patterns), probs, residual)


def sample_patterns(distribution: Distribution, count: int, seed: int) -> list:
    """Draw ``count`` outcomes; residual mass maps to :data:`OVERFLOW`.

    The generator is PCG64 seeded with ``seed`` (an unsigned 64-bit integer),
    so a given seed yields the same sequence on every platform.
    """
    if len(distribution) == 0:
        raise ValueError("cannot sample from an empty distribution")
    if count < 0:
        raise ValueError("count must be >= 0")
    weights = np.append(np.clip(distribution.probabilities, 0.0, None),
                        max(distribution.residual, 0.0))
    cdf = np.cumsum(weights)
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right")
    idx = np.minimum(idx, len(weights) - 1)
    outcomes = list(distribution.patterns) + [OVERFLOW]
    return [outcomes[i] for i in idx]


def write_samples(samples, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample", "pattern"])
        for i, s in enumerate(samples):
            writer.writerow([i, s.label])


def fock_oracle_two_mode(r: float, eta: float, cutoff: int = 20) -> np.ndarray:
    """Joint photon-number distribution ``p[k1, k2]`` of lossy two-mode squeezed vacuum.

    The squeezed vacuum populates ``|n, n>`` with weight
    ``tanh(r)^(2n) / cosh(r)^2`` for ``n <= cutoff``; each mode then passes a
    loss channel of intensity transmissivity ``eta``, which thins photon
    numbers binomially.  The dropped tail weighs ``tanh(r)^(2 (cutoff + 1))``.
    """
    if not 0 <= cutoff <= MAX_FOCK_CUTOFF:
        raise ValueError(f"cutoff must lie in 0..{MAX_FOCK_CUTOFF}, got {cutoff}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    ns = np.arange(cutoff + 1)
    pairs = np.tanh(r) ** (2 * ns) / np.cosh(r) ** 2
    thin = np.array([[math.comb(n, k) * eta**k * (1 - eta) ** (n - k) if k <= n else 0.0
                      for n in ns] for k in ns])
    return thin @ np.diag(pairs) @ thin.T


def read_matrix_csv(path) -> np.ndarray:
    """Square matrix from CSV; entries may be complex (Python ``complex`` syntax)."""
    text = Path(path).read_text()
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    try:
        values = [[complex(v.strip().replace(" ", "")) for v in row] for row in rows]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if any(len(row) != len(rows) for row in values):
        raise ValueError(f"{path}: matrix is not square")
    m = np.array(values, dtype=complex)
    return m.real.copy() if not np.any(m.imag) else m


def write_matrix_csv(m: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(m):
            writer.writerow([repr(float(v)) if np.isrealobj(v) else repr(complex(v)) for v in row])

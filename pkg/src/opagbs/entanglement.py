"""Logarithmic negativity of Gaussian states across a bipartition."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._precision import workdps
from .exceptions import UnphysicalStateError
from .gaussian_core import CovarianceState, log_symplectic_eigenvalues, symplectic_eigenvalues
from .opa_network import Bipartition

PHYSICAL_TOL = 1e-6
UNIT_CLAMP = 1e-12


@dataclass(frozen=True)
class PartialTransposeMap:
    """Diagonal +-1 map flipping the momenta of subsystem B (XXPP ordering)."""

    n: int
    b_modes: tuple[int, ...]

    def diagonal(self) -> np.ndarray:
        signs = np.ones(2 * self.n, dtype=int)
        for mode in self.b_modes:
            signs[self.n + mode - 1] = -1
        return signs


@dataclass(frozen=True)
class NegativityResult:
    value: float
    nu_tilde: tuple[float, ...]
    partition: Bipartition
    base: float = 2.0


def _check_partition(state: CovarianceState, partition: Bipartition):
    if partition.n != state.n:
        raise ValueError(f"partition covers {partition.n} modes, state has {state.n}")


def partial_transpose(state: CovarianceState, partition: Bipartition) -> CovarianceState:
    _check_partition(state, partition)
    if state.ordering != "xxpp":
        state = state.to_ordering("xxpp")
    signs = PartialTransposeMap(state.n, partition.b_modes).diagonal()
    flip = np.outer(signs, signs)
    with workdps(state.dps):
        sigma = state.sigma * flip
    return CovarianceState(state.n, sigma, dps=state.dps)


def _log_base(base) -> float:
    if base in ("e", math.e):
        return 1.0
    if base in (2, "2"):
        return math.log(2)
    raise ValueError(f"log base must be 2 or 'e', got {base!r}")


def _negativity_from_logs(log_nu: np.ndarray, base) -> float:
    # eigenvalues within UNIT_CLAMP of 1 contribute exactly zero
    contrib = np.where(log_nu < -UNIT_CLAMP, -log_nu, 0.0)
    return float(math.fsum(contrib) / _log_base(base))


def check_physical(state: CovarianceState, tol: float = PHYSICAL_TOL):
    nu_min = float(np.min(symplectic_eigenvalues(state)))
    if nu_min < 1 - tol:
        raise UnphysicalStateError(f"smallest symplectic eigenvalue {nu_min:.6g} < 1")


def log_negativity(state: CovarianceState, partition: Bipartition, base=2,
                   check: bool = True) -> NegativityResult:
    """Sum of ``max(0, -log nu)`` over partial-transpose symplectic eigenvalues."""
    _check_partition(state, partition)
    if check:
        check_physical(state)
    return _negativity(state, partition, base)


def _negativity(state, partition, base):
    transposed = partial_transpose(state, partition)
    log_nu = log_symplectic_eigenvalues(transposed)
    return NegativityResult(
        value=_negativity_from_logs(log_nu, base),
        nu_tilde=tuple(float(v) for v in np.exp(log_nu)),
        partition=partition,
        base=math.e if _log_base(base) == 1.0 else 2.0,
    )


def partition_sweep(state: CovarianceState, partitions: Sequence[Bipartition],
                    base=2) -> list[NegativityResult]:
    """One result per partition, in input order; the physicality check runs once."""
    for p in partitions:
        _check_partition(state, p)
    check_physical(state)
    return [_negativity(state, p, base) for p in partitions]


def contiguous_partitions(n: int) -> list[Bipartition]:
    """``(n/2, n/2), (n/2+1, n/2-1), ..., (n-1, 1)``."""
    return [Bipartition.contiguous(a, n - a) for a in range(n - n // 2, n)]

"""Staggered SU(1,1) network of two-mode squeezers (OPAs).

Layer ``l`` (1-based) is *odd* when ``l`` is odd: it holds ``n/2`` OPAs on
mode pairs ``(1,2), (3,4), ..., (n-1,n)``.  Even layers hold ``n/2 - 1`` OPAs
on ``(2,3), ..., (n-2,n-1)`` and leave modes 1 and n untouched.  Position ``j``
in a layer counts OPAs from 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import mpmath
import numpy as np

from . import _precision as prec
from .gaussian_core import CovarianceState, SymplecticMatrix, apply_symplectic

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class OpaSpec:
    """Squeezing magnitude ``r >= 0`` and angle ``theta`` (radians)."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r >= 0):
            raise ValueError(f"squeezing r must be finite and >= 0, got {self.r!r}")
        if not np.isfinite(self.theta):
            raise ValueError("theta must be finite")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)


def opas_in_layer(n: int, layer: int) -> int:
    return n // 2 if layer % 2 == 1 else n // 2 - 1


def opa_modes(layer: int, position: int) -> tuple[int, int]:
    """1-based modes coupled by OPA ``position`` of ``layer``."""
    first = 2 * position - 1 if layer % 2 == 1 else 2 * position
    return first, first + 1


@dataclass(frozen=True)
class Bipartition:
    """Split of modes ``1..n`` into subsystems A and B (1-based, sorted)."""

    a_modes: tuple[int, ...]
    b_modes: tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(sorted(self.a_modes)), tuple(sorted(self.b_modes))
        if not a or not b:
            raise ValueError("both sides of a bipartition must be non-empty")
        if set(a) & set(b):
            raise ValueError(f"modes {sorted(set(a) & set(b))} appear on both sides")
        if set(a) | set(b) != set(range(1, len(a) + len(b) + 1)):
            raise ValueError("bipartition must cover modes 1..n exactly")
        object.__setattr__(self, "a_modes", a)
        object.__setattr__(self, "b_modes", b)

    @property
    def n(self) -> int:
        return len(self.a_modes) + len(self.b_modes)

    @classmethod
    def contiguous(cls, n_a: int, n_b: int) -> "Bipartition":
        """``(5, 3)`` -> A = (1..5), B = (6..8)."""
        return cls(tuple(range(1, n_a + 1)), tuple(range(n_a + 1, n_a + n_b + 1)))

    @classmethod
    def interleaved(cls, n: int) -> "Bipartition":
        """Odd modes against even modes; every OPA straddles the cut."""
        return cls(tuple(range(1, n + 1, 2)), tuple(range(2, n + 1, 2)))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Bipartition":
        """Parse ``"(5,3)"``, ``"equal"``, ``"interleaved"`` or ``"1 2 5 | 3 4 6"``.

        The two named forms need the mode count ``n``.
        """
        text = text.strip()
        if text in ("equal", "interleaved"):
            if n is None or n < 2:
                raise ValueError(f"{text!r} partition needs a mode count >= 2")
            return cls.contiguous(n // 2, n - n // 2) if text == "equal" else cls.interleaved(n)
        if "|" in text:
            left, right = text.split("|")
            return cls(
                tuple(int(v) for v in left.replace(",", " ").split()),
                tuple(int(v) for v in right.replace(",", " ").split()),
            )
        inner = text.strip("()")
        try:
            n_a, n_b = (int(v) for v in inner.split(","))
        except ValueError:
            raise ValueError(f"cannot parse partition {text!r}") from None
        return cls.contiguous(n_a, n_b)

    @property
    def label(self) -> str:
        if self == Bipartition.contiguous(len(self.a_modes), len(self.b_modes)):
            return f"({len(self.a_modes)},{len(self.b_modes)})"
        return " ".join(map(str, self.a_modes)) + " | " + " ".join(map(str, self.b_modes))

    def swapped(self) -> "Bipartition":
        return Bipartition(self.b_modes, self.a_modes)


@dataclass(frozen=True, eq=True)
class NetworkSpec:
    """Mode count, depth and per-element parameter tables.

    ``opas`` maps ``(layer, position)`` to an :class:`OpaSpec`;
    ``transmittance`` maps ``(layer, mode)`` to the amplitude transmittance
    ``t`` of the loss beam splitter after that layer (intensity ``t**2``).
    Missing entries mean ``r = 0`` and ``t = 1``.
    """

    n: int
    d: int
    opas: Mapping[tuple[int, int], OpaSpec] = field(default_factory=dict)
    transmittance: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2 or self.n % 2:
            raise ValueError(f"mode count n must be even and >= 2, got {self.n!r}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"depth d must be >= 1, got {self.d!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))
        opas = {}
        for (layer, pos), spec in dict(self.opas).items():
            if not 1 <= layer <= self.d or not 1 <= pos <= opas_in_layer(self.n, layer):
                raise ValueError(f"no OPA at layer {layer}, position {pos}")
            opas[(int(layer), int(pos))] = spec if isinstance(spec, OpaSpec) else OpaSpec(*spec)
        trans = {}
        for (layer, mode), t in dict(self.transmittance).items():
            if not 1 <= layer <= self.d or not 1 <= mode <= self.n:
                raise ValueError(f"no beam splitter at layer {layer}, mode {mode}")
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"transmittance must lie in [0, 1], got {t!r} at ({layer}, {mode})")
            trans[(int(layer), int(mode))] = float(t)
        object.__setattr__(self, "opas", opas)
        object.__setattr__(self, "transmittance", trans)

    __hash__ = None

    @classmethod
    def uniform(cls, n: int, d: int, r: float, theta: float = 0.0, t: float = 1.0) -> "NetworkSpec":
        """Every OPA gets ``(r, theta)``, every beam splitter ``t``."""
        opa = OpaSpec(r, theta)
        opas = {(l, j): opa for l in range(1, d + 1) for j in range(1, opas_in_layer(n, l) + 1)}
        trans = {(l, i): t for l in range(1, d + 1) for i in range(1, n + 1)}
        return cls(n, d, opas, trans)

    def opa(self, layer: int, position: int) -> OpaSpec:
        return self.opas.get((layer, position), OpaSpec(0.0))

    def t(self, layer: int, mode: int) -> float:
        return self.transmittance.get((layer, mode), 1.0)

    def layer_transmittances(self, layer: int) -> np.ndarray:
        return np.array([self.t(layer, i) for i in range(1, self.n + 1)])

    @property
    def lossless(self) -> bool:
        return all(t == 1.0 for t in self.transmittance.values())

    def max_squeezing(self) -> float:
        return max((o.r for o in self.opas.values()), default=0.0)

    def truncated(self, layers: range) -> "NetworkSpec":
        """Sub-network made of ``layers`` (consecutive, renumbered from the first)."""
        first = layers[0]
        if first % 2 == 0:
            raise ValueError("sub-networks must start on an odd layer to keep layer parity")
        opas = {(l - first + 1, j): o for (l, j), o in self.opas.items() if l in layers}
        trans = {(l - first + 1, i): t for (l, i), t in self.transmittance.items() if l in layers}
        return NetworkSpec(self.n, len(layers), opas, trans)


def opa_blocks(spec: OpaSpec, dps=None):
    """The 2x2 blocks ``(A, B, C)`` of a single OPA in XXPP ordering."""
    m = prec.lib(dps)
    dtype = object if dps else float
    with prec.workdps(dps):
        r, th = (mpmath.mpf(spec.r), mpmath.mpf(spec.theta)) if dps else (spec.r, spec.theta)
        ch, sh = m.cosh(r), m.sinh(r)
        c, s = m.cos(th), m.sin(th)
        zero = mpmath.mpf(0) if dps else 0.0
        a = np.array([[ch, -c * sh], [-c * sh, ch]], dtype=dtype)
        b = np.array([[zero, -s * sh], [-s * sh, zero]], dtype=dtype)
        cc = np.array([[ch, c * sh], [c * sh, ch]], dtype=dtype)
    return a, b, cc


def opa_symplectic(spec: OpaSpec, dps=None) -> SymplecticMatrix:
    """4x4 symplectic matrix of one OPA on ``(x1, x2, p1, p2)``."""
    a, b, c = opa_blocks(spec, dps)
    return SymplecticMatrix(2, np.block([[a, b], [b, c]]), dps=dps)


def layer_symplectic(spec: NetworkSpec, layer: int, dps=None) -> SymplecticMatrix:
    if not 1 <= layer <= spec.d:
        raise ValueError(f"layer must lie in 1..{spec.d}, got {layer}")
    n = spec.n
    s = prec.eye(2 * n, dps)
    for j in range(1, opas_in_layer(n, layer) + 1):
        opa = spec.opa(layer, j)
        if opa.r == 0.0:
            continue
        a, b, c = opa_blocks(opa, dps)
        i1, i2 = opa_modes(layer, j)
        xs = [i1 - 1, i2 - 1]
        ps = [n + i1 - 1, n + i2 - 1]
        s[np.ix_(xs, xs)] = a
        s[np.ix_(xs, ps)] = b
        s[np.ix_(ps, xs)] = b
        s[np.ix_(ps, ps)] = c
    return SymplecticMatrix(n, s, dps=dps)


def network_symplectic(spec: NetworkSpec, dps=None, layers: range | None = None) -> SymplecticMatrix:
    """Whole-network transform; layer 1 is the rightmost factor.

    ``layers`` restricts the product to a consecutive run of layers, keeping
    their original parity.
    """
    layers = range(1, spec.d + 1) if layers is None else layers
    total = SymplecticMatrix.identity(spec.n, dps)
    for layer in layers:
        total = layer_symplectic(spec, layer, dps) @ total
    return total


def propagate_lossless(spec: NetworkSpec, state: CovarianceState, dps=None) -> CovarianceState:
    if state.n != spec.n:
        raise ValueError(f"network has {spec.n} modes, state has {state.n}")
    if not spec.lossless:
        raise ValueError("propagate_lossless needs every transmittance equal to 1")
    dps = dps or state.dps
    return apply_symplectic(state, network_symplectic(spec, dps))

"""Photon loss in the OPA network, computed by two independent engines.

The *channel* engine composes Gaussian channels ``(X, Y)`` acting as
``sigma -> X sigma X^T + Y``: every OPA layer is ``(S, 0)`` and every
beam-splitter layer is a pure-loss channel.  It is the production path.

The *moment* engine follows the ladder operators instead.  Two consecutive
layers map ``A = (a, a^dag)`` to ``V A + U F_k + Q F_{k+1}`` where ``F`` are
vacuum environment modes; second moments of the output are summed from these
maps and converted back to a quadrature covariance.  It only handles vacuum
input and serves as a cross-check of the channel engine.

Amplitude transmittance ``t`` corresponds to intensity transmissivity
``eta = t**2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from . import _precision as prec
from .gaussian_core import (
    ComplexTransform,
    CovarianceState,
    SymplecticMatrix,
    symplectic_form,
    vacuum_state,
)
from .opa_network import NetworkSpec, layer_symplectic, opa_modes, opas_in_layer

CP_FLOOR = -1e-10


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    """``sigma -> x sigma x^T + y`` on ``n`` modes (XXPP, vacuum = identity)."""

    n: int
    x: np.ndarray
    y: np.ndarray
    dps: int | None = None

    def __post_init__(self):
        x = prec.asarray(self.x, self.dps)
        y = prec.asarray(self.y, self.dps)
        size = 2 * self.n
        if x.shape != (size, size) or y.shape != (size, size):
            raise ValueError(f"channel matrices must be {size}x{size}")
        yf = prec.to_float(y)
        if np.max(np.abs(yf - yf.T)) > 1e-12 * max(1.0, np.max(np.abs(yf))):
            raise ValueError("channel noise matrix Y must be symmetric")
        with prec.workdps(self.dps):
            y = (y + y.T) / 2
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def cp_min_eigenvalue(self) -> float:
        """Smallest eigenvalue of ``Y + i Omega - i X Omega X^T``."""
        omega = symplectic_form(self.n)
        if not self.dps:
            h = self.y + 1j * omega - 1j * (self.x @ omega @ self.x.T)
            return float(np.min(np.linalg.eigvalsh(h)))
        with mpmath.workdps(self.dps):
            xox = self.x @ omega @ self.x.T
            h = mpmath.matrix(2 * self.n)
            for i in range(2 * self.n):
                for j in range(2 * self.n):
                    h[i, j] = mpmath.mpc(self.y[i, j], omega[i, j] - xox[i, j])
            ev = mpmath.eighe(h, eigvals_only=True)
            return float(min(ev[i] for i in range(2 * self.n)))

    def is_cp(self, floor: float = CP_FLOOR) -> bool:
        return self.cp_min_eigenvalue() >= floor

    def as_float(self) -> "GaussianChannel":
        return GaussianChannel(self.n, prec.to_float(self.x), prec.to_float(self.y))


def identity_channel(n: int, dps=None) -> GaussianChannel:
    return GaussianChannel(n, prec.eye(2 * n, dps), prec.zeros((2 * n, 2 * n), dps), dps)


def symplectic_channel(s: SymplecticMatrix) -> GaussianChannel:
    if s.ordering != "xxpp":
        s = s.to_ordering("xxpp")
    return GaussianChannel(s.n, s.m, prec.zeros((2 * s.n, 2 * s.n), s.dps), s.dps)


def loss_channel(n: int, eta, dps=None) -> GaussianChannel:
    """Independent pure loss on each mode; ``eta`` is a scalar or per-mode list."""
    eta = np.broadcast_to(np.asarray(eta, dtype=float), (n,))
    if np.any((eta < 0) | (eta > 1)) or not np.all(np.isfinite(eta)):
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta.tolist()}")
    m = prec.lib(dps)
    with prec.workdps(dps):
        amplitudes = [m.sqrt(mpmath.mpf(e) if dps else e) for e in eta]
    return _loss_from_amplitudes(n, amplitudes, dps)


def _loss_from_amplitudes(n, amplitudes, dps):
    with prec.workdps(dps):
        x = prec.zeros((2 * n, 2 * n), dps)
        y = prec.zeros((2 * n, 2 * n), dps)
        for i, t in enumerate(amplitudes):
            t = mpmath.mpf(t) if dps else float(t)
            x[i, i] = x[n + i, n + i] = t
            y[i, i] = y[n + i, n + i] = 1 - t * t
    return GaussianChannel(n, x, y, dps)


def compose(second: GaussianChannel, first: GaussianChannel) -> GaussianChannel:
    """Channel applying ``first`` and then ``second``."""
    if second.n != first.n:
        raise ValueError(f"cannot compose channels on {second.n} and {first.n} modes")
    dps = max(second.dps or 0, first.dps or 0) or None
    with prec.workdps(dps):
        x = second.x @ first.x
        y = second.y + second.x @ first.y @ second.x.T
    return GaussianChannel(first.n, x, y, dps)


def apply_channel(channel: GaussianChannel, state: CovarianceState) -> CovarianceState:
    if channel.n != state.n:
        raise ValueError(f"channel acts on {channel.n} modes, state has {state.n}")
    if state.ordering != "xxpp":
        state = state.to_ordering("xxpp")
    dps = max(channel.dps or 0, state.dps or 0) or None
    sigma = state.sigma if dps == state.dps else prec.asarray(state.sigma, dps)
    with prec.workdps(dps):
        out = channel.x @ sigma @ channel.x.T + channel.y
    return CovarianceState(state.n, out, dps=dps)


def layer_loss_channel(spec: NetworkSpec, layer: int, dps=None) -> GaussianChannel:
    """Beam-splitter layer after OPA layer ``layer`` (intensity ``t**2`` per mode)."""
    return _loss_from_amplitudes(spec.n, spec.layer_transmittances(layer), dps)


def lossy_network_channel(spec: NetworkSpec, dps=None) -> GaussianChannel:
    """OPA layer ``l`` followed by its loss layer, for ``l = 1..d``."""
    channel = identity_channel(spec.n, dps)
    for layer in range(1, spec.d + 1):
        channel = compose(symplectic_channel(layer_symplectic(spec, layer, dps)), channel)
        if any(spec.t(layer, i) != 1.0 for i in range(1, spec.n + 1)):
            channel = compose(layer_loss_channel(spec, layer, dps), channel)
    return channel


# --- operator-moment engine ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComplexLayerMaps:
    """Ladder-operator maps of a two-layer block: ``A -> v A + u F_k + q F_{k+1}``."""

    v: np.ndarray
    u: np.ndarray
    q: np.ndarray
    dps: int | None = None

    def commutator_residual(self) -> float:
        """Max deviation of ``v J v^T + u J u^T + q J q^T`` from ``J``.

        ``J = [[0, I], [-I, 0]]`` holds ``[A_l, A_k]`` for bosonic ladder vectors.
        """
        n = self.v.shape[0] // 2
        j = symplectic_form(n)
        with prec.workdps(self.dps):
            total = self.v @ j @ self.v.T + self.u @ j @ self.u.T + self.q @ j @ self.q.T
            diff = total - j
        return float(np.max(np.abs(prec.to_float(diff))))


def _cplx(dps):
    return (lambda v: mpmath.mpc(v)) if dps else complex


def bogoliubov_layer(spec: NetworkSpec, layer: int, dps=None) -> np.ndarray:
    """Ladder-basis matrix ``[[M, N], [N*, M]]`` of OPA layer ``layer``.

    Each OPA maps ``a_i -> cosh r a_i - e^{i theta} sinh r a_j^dag``.
    """
    n = spec.n
    c = _cplx(dps)
    m = prec.lib(dps)
    g = np.full((2 * n, 2 * n), c(0), dtype=object if dps else complex)
    with prec.workdps(dps):
        for i in range(2 * n):
            g[i, i] = c(1)
        if layer > spec.d:
            return g
        for j in range(1, opas_in_layer(n, layer) + 1):
            opa = spec.opa(layer, j)
            if opa.r == 0.0:
                continue
            r = mpmath.mpf(opa.r) if dps else opa.r
            th = mpmath.mpf(opa.theta) if dps else opa.theta
            ch, sh = m.cosh(r), m.sinh(r)
            phase = mpmath.expj(th) if dps else np.exp(1j * th)
            i1, i2 = (k - 1 for k in opa_modes(layer, j))
            for a, b in ((i1, i2), (i2, i1)):
                g[a, a] = g[n + a, n + a] = c(ch)
                g[a, n + b] = -phase * sh
                g[n + a, b] = -phase.conjugate() * sh
    return g


def _beam_splitter_blocks(spec: NetworkSpec, layer: int, dps=None):
    """``(diag(t, t), diag(sqrt(1-t^2), ...))`` acting on ``(a, a^dag)`` / ``(f, f^dag)``."""
    n = spec.n
    t = spec.layer_transmittances(layer) if layer <= spec.d else np.ones(n)
    m = prec.lib(dps)
    c = _cplx(dps)
    trans = np.full((2 * n, 2 * n), c(0), dtype=object if dps else complex)
    refl = np.full((2 * n, 2 * n), c(0), dtype=object if dps else complex)
    with prec.workdps(dps):
        for i in range(n):
            ti = mpmath.mpf(t[i]) if dps else t[i]
            ri = m.sqrt(1 - ti * ti)
            trans[i, i] = trans[n + i, n + i] = c(ti)
            refl[i, i] = refl[n + i, n + i] = c(ri)
    return trans, refl


def complex_layer_maps(spec: NetworkSpec, block: int, dps=None) -> ComplexLayerMaps:
    """Maps for layers ``2*block - 1`` and ``2*block`` (``block`` counts from 1).

    A layer beyond ``spec.d`` is the identity without loss, which is how odd
    depths are padded.
    """
    k = 2 * block - 1
    g1, g2 = bogoliubov_layer(spec, k, dps), bogoliubov_layer(spec, k + 1, dps)
    t1, r1 = _beam_splitter_blocks(spec, k, dps)
    t2, r2 = _beam_splitter_blocks(spec, k + 1, dps)
    with prec.workdps(dps):
        l1 = t1 @ g1
        l2 = t2 @ g2
        return ComplexLayerMaps(l2 @ l1, l2 @ r1, r2, dps)


def _vacuum_moments(maps, n):
    """``<A_l A_k> = sum_x M_{l,x} M_{k,x+n}`` summed over maps acting on vacuum."""
    total = None
    for mat in maps:
        term = mat[:, :n] @ mat[:, n:].T
        total = term if total is None else total + term
    return total


def operator_moment_covariance(spec: NetworkSpec, dps=None) -> CovarianceState:
    """Output covariance for vacuum input, from the ladder-operator maps."""
    n = spec.n
    blocks = [complex_layer_maps(spec, b, dps) for b in range(1, (spec.d + 1) // 2 + 1)]
    with prec.workdps(dps):
        # A_out = prod V A + sum_i (prod_{j>i} V_j) (U_i F_{2i-1} + Q_i F_{2i})
        tail = prec.asarray(np.eye(2 * n), dps, complex_=True) if dps else np.eye(2 * n, dtype=complex)
        maps = []
        for blk in reversed(blocks):
            maps.append(tail @ blk.u)
            maps.append(tail @ blk.q)
            tail = tail @ blk.v
        maps.append(tail)
        moments = _vacuum_moments(maps, n)
        t = ComplexTransform.for_modes(n)
        tm = t.mp(dps) if dps else t.t
        tdag = prec.conj(tm).T
        sigma = prec.real_part(tdag @ (moments + moments.T) @ tdag.T)
    return CovarianceState(n, sigma, dps=dps)


# --- convenience --------------------------------------------------------------

ENGINES = ("channel", "moment")


def auto_dps(spec: NetworkSpec) -> int | None:
    """Precision needed for the vacuum output of ``spec``, from a float64 pass."""
    ch = lossy_network_channel(spec)
    return prec.dps_for_norm(float(np.linalg.norm(ch.x @ ch.x.T + ch.y, 2)))


def resolve_dps(spec: NetworkSpec, precision="auto") -> int | None:
    """``"auto"`` -> :func:`auto_dps`; ``None``/``"float"`` -> float64; int -> digits."""
    if precision == "auto":
        return auto_dps(spec)
    if precision in (None, "float", 0):
        return None
    return int(precision)


def output_state(spec: NetworkSpec, engine: str = "channel", precision="auto",
                 input_state: CovarianceState | None = None) -> CovarianceState:
    """Output covariance of the lossy network (vacuum input unless given)."""
    dps = resolve_dps(spec, precision)
    if engine == "channel":
        state = input_state if input_state is not None else vacuum_state(spec.n, dps)
        return apply_channel(lossy_network_channel(spec, dps), state)
    if engine == "moment":
        if input_state is not None:
            raise ValueError("the moment engine only propagates vacuum input")
        return operator_moment_covariance(spec, dps)
    raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")


# --- orderings of loss vs. passive / active elements --------------------------


def beam_splitter_symplectic(theta: float) -> SymplecticMatrix:
    """Two-mode beam splitter ``[[cos I, sin I], [-sin I, cos I]]`` in mode blocks."""
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, s], [-s, c]])
    zero = np.zeros((2, 2))
    return SymplecticMatrix(2, np.block([[rot, zero], [zero, rot]]))


def single_mode_squeezer(r: float) -> SymplecticMatrix:
    return SymplecticMatrix(1, np.diag([np.exp(r), np.exp(-r)]))


@dataclass(frozen=True, eq=False)
class OrderingComparison:
    label: str
    after: GaussianChannel
    before: GaussianChannel

    @property
    def x_diff(self) -> float:
        return float(np.max(np.abs(self.after.x - self.before.x)))

    @property
    def y_diff(self) -> float:
        return float(np.max(np.abs(self.after.y - self.before.y)))

    @property
    def max_diff(self) -> float:
        return max(self.x_diff, self.y_diff)

    def equal(self, tol: float = 1e-12) -> bool:
        return self.max_diff <= tol


def compare_orderings(element: SymplecticMatrix, eta: float, label: str) -> OrderingComparison:
    """Loss after vs. loss before a Gaussian unitary."""
    unitary = symplectic_channel(element)
    loss = loss_channel(element.n, eta)
    return OrderingComparison(label, after=compose(loss, unitary), before=compose(unitary, loss))


@dataclass(frozen=True, eq=False)
class CommutationReport:
    r: float
    theta_bs: float
    eta: float
    beam_splitter: OrderingComparison
    squeezer: OrderingComparison

    @property
    def expected_squeezer_y_delta(self) -> np.ndarray:
        """``Y_before - Y_after = (1 - eta) (diag(e^{2r}, e^{-2r}) - I)``."""
        return (1 - self.eta) * (np.diag([np.exp(2 * self.r), np.exp(-2 * self.r)]) - np.eye(2))

    @property
    def squeezer_y_delta(self) -> np.ndarray:
        return self.squeezer.before.y - self.squeezer.after.y

    def rows(self):
        """``(case, ordering, matrix, i, j, value)`` tuples for CSV export."""
        for comp in (self.beam_splitter, self.squeezer):
            for ordering, ch in (("after", comp.after), ("before", comp.before)):
                for name, mat in (("X", ch.x), ("Y", ch.y)):
                    for (i, j), v in np.ndenumerate(mat):
                        yield comp.label, ordering, name, i, j, float(v)


def commutation_report(r: float, theta_bs: float, eta: float) -> CommutationReport:
    return CommutationReport(
        r, theta_bs, eta,
        beam_splitter=compare_orderings(beam_splitter_symplectic(theta_bs), eta, "beam-splitter"),
        squeezer=compare_orderings(single_mode_squeezer(r), eta, "squeezer"),
    )

"""Config files, parameter sweeps and Gaussian-channel demos behind the CLI.

Config files are INI-style::

    [network]
    n = 8
    d = 16
    r = 0.8            # uniform squeezing, optional
    theta = 0.0
    t = 1.0            # uniform amplitude transmittance, optional
    partitions = (4,4); (5,3); (6,2); (7,1)   # ";"-separated
    engine = channel   # or moment
    precision = auto   # auto | float | <decimal digits>

    [opa]              # per-element overrides, "layer,position = r[, theta]"
    1,2 = 0.5, 0.0

    [transmittance]    # "layer,mode = t"
    3,1 = 0.9

    [sweep]            # axes: comma lists or inclusive ranges start:stop[:step]
    d = 8:24:2
    r = 0.8, 1.6
    fit = d

    [sample]
    max_total = 8
    count = 1000

    [output]
    path = results.csv
"""
from __future__ import annotations

import configparser
import csv
import io
import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _precision as prec
from .entanglement import partition_sweep
from .exceptions import ResourceLimitError
from .gaussian_core import bloch_messiah_two_mode, two_mode_squeezer_xpxp
from .loss_channels import (
    ENGINES,
    GaussianChannel,
    commutation_report,
    compose,
    loss_channel,
    output_state,
    resolve_dps,
)
from .opa_network import Bipartition, NetworkSpec, OpaSpec, opas_in_layer

SWEEP_AXES = ("n", "d", "r", "t")
MAX_GRID_POINTS = 100_000
SWEEP_COLUMNS = ("n", "d", "r", "theta", "t", "partition", "E_N", "engine",
                 "slope", "intercept", "r_squared")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


# --- parsing -----------------------------------------------------------------


def _number(section: str, key: str, text: str, kind=float):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {text!r}") from None
    if kind is int:
        if value != int(value):
            raise ConfigError(f"[{section}] {key}: expected an integer, got {text!r}")
        return int(value)
    return value


def parse_axis(key: str, text: str) -> list:
    """``"0.8, 1.6"`` or an inclusive range ``"2:24:2"`` (step defaults to 1)."""
    kind = int if key in ("n", "d") else float
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(f"[sweep] {key}: range must be start:stop[:step]")
        start, stop = (_number("sweep", key, p, kind) for p in parts[:2])
        step = _number("sweep", key, parts[2], kind) if len(parts) == 3 else 1
        if step <= 0 or stop < start:
            raise ConfigError(f"[sweep] {key}: empty or descending range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
        return values if kind is int else [round(v, 12) for v in values]
    values = [_number("sweep", key, v, kind) for v in text.split(",") if v.strip()]
    if not values:
        raise ConfigError(f"[sweep] {key}: no values")
    return values


def _pair_key(section: str, key: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in key.split(","))
    except ValueError:
        raise ConfigError(f"[{section}] {key}: keys must look like 'layer,index'") from None
    return a, b


def read_config(source) -> configparser.ConfigParser:
    """Parse a path, an open file or an INI string."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        if isinstance(source, configparser.ConfigParser):
            return source
        if isinstance(source, str) and "\n" in source:
            parser.read_string(source)
        else:
            with open(source) as fh:
                parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return parser


def network_from_config(cfg: configparser.ConfigParser) -> NetworkSpec:
    if not cfg.has_section("network"):
        raise ConfigError("missing [network] section")
    net = cfg["network"]
    for key in ("n", "d"):
        if key not in net:
            raise ConfigError(f"[network] {key}: required key missing")
    n = _number("network", "n", net["n"], int)
    d = _number("network", "d", net["d"], int)
    if n < 2 or n % 2:
        raise ConfigError(f"[network] n: must be even and >= 2, got {n}")
    if d < 1:
        raise ConfigError(f"[network] d: must be >= 1, got {d}")
    theta = _number("network", "theta", net.get("theta", "0"))
    opas, trans = {}, {}
    if "r" in net:
        r = _number("network", "r", net["r"])
        if r < 0:
            raise ConfigError(f"[network] r: must be >= 0, got {r}")
        opas = dict(NetworkSpec.uniform(n, d, r, theta).opas)
    if "t" in net:
        t = _number("network", "t", net["t"])
        if not 0 <= t <= 1:
            raise ConfigError(f"[network] t: must lie in [0, 1], got {t}")
        trans = dict(NetworkSpec.uniform(n, d, 0.0, 0.0, t).transmittance)
    if cfg.has_section("opa"):
        for key, text in cfg["opa"].items():
            vals = [_number("opa", key, v) for v in text.split(",")]
            if len(vals) not in (1, 2):
                raise ConfigError(f"[opa] {key}: expected 'r' or 'r, theta'")
            layer, pos = _pair_key("opa", key)
            if not 1 <= layer <= d or not 1 <= pos <= opas_in_layer(n, layer):
                raise ConfigError(f"[opa] {key}: no OPA at layer {layer}, position {pos}")
            try:
                opas[(layer, pos)] = OpaSpec(vals[0], vals[1] if len(vals) == 2 else theta)
            except ValueError as exc:
                raise ConfigError(f"[opa] {key}: {exc}") from None
    if cfg.has_section("transmittance"):
        for key, text in cfg["transmittance"].items():
            layer, mode = _pair_key("transmittance", key)
            t = _number("transmittance", key, text)
            if not 1 <= layer <= d or not 1 <= mode <= n:
                raise ConfigError(f"[transmittance] {key}: no mode {mode} in layer {layer}")
            if not 0 <= t <= 1:
                raise ConfigError(f"[transmittance] {key}: must lie in [0, 1], got {t}")
            trans[(layer, mode)] = t
    try:
        return NetworkSpec(n, d, opas, trans)
    except ValueError as exc:
        raise ConfigError(f"[network] {exc}") from None


def network_to_config(spec: NetworkSpec) -> configparser.ConfigParser:
    """Explicit per-element tables; :func:`network_from_config` inverts it exactly."""
    cfg = configparser.ConfigParser()
    cfg.optionxform = str
    cfg["network"] = {"n": str(spec.n), "d": str(spec.d)}
    cfg["opa"] = {f"{l},{j}": f"{o.r!r}, {o.theta!r}" for (l, j), o in sorted(spec.opas.items())}
    cfg["transmittance"] = {f"{l},{i}": repr(t) for (l, i), t in sorted(spec.transmittance.items())}
    return cfg


def config_to_string(cfg: configparser.ConfigParser) -> str:
    buf = io.StringIO()
    cfg.write(buf)
    return buf.getvalue()


def partitions_from_config(cfg, n: int | None = None) -> list[str]:
    """Partition specs as text; resolved per mode count by :func:`resolve_partition`."""
    text = cfg.get("network", "partitions", fallback="equal")
    specs = [p.strip() for p in text.split(";") if p.strip()]
    if not specs:
        raise ConfigError("[network] partitions: empty list")
    if n is not None:
        for p in specs:
            resolve_partition(p, n)
    return specs


def resolve_partition(text: str, n: int) -> Bipartition:
    try:
        part = Bipartition.parse(text, n)
    except ValueError as exc:
        raise ConfigError(f"[network] partitions: {exc}") from None
    if part.n != n:
        raise ConfigError(f"[network] partitions: {text!r} covers {part.n} modes, network has {n}")
    return part


def engine_from_config(cfg) -> str:
    engine = cfg.get("network", "engine", fallback="channel")
    if engine not in ENGINES:
        raise ConfigError(f"[network] engine: expected one of {ENGINES}, got {engine!r}")
    return engine


def precision_from_config(cfg):
    text = cfg.get("network", "precision", fallback="auto").strip()
    if text in ("auto", "float"):
        return text
    value = _number("network", "precision", text, int)
    if value < 16:
        raise ConfigError("[network] precision: digits must be >= 16")
    return value


# --- single point --------------------------------------------------------------


@dataclass(frozen=True)
class NegativityRow:
    partition: str
    value: float
    engine: str


@dataclass(frozen=True, eq=False)
class SimulationResult:
    spec: NetworkSpec
    states: dict
    rows: tuple[NegativityRow, ...]
    discrepancy: float | None = None


def frobenius_discrepancy(a, b) -> float:
    """``||a - b||_F``, with the difference formed before rounding to float."""
    dps = max(a.dps or 0, b.dps or 0) or None
    with prec.workdps(dps):
        diff = prec.asarray(a.sigma, dps) - prec.asarray(b.sigma, dps)
    return float(np.linalg.norm(prec.to_float(diff)))


def simulate(spec: NetworkSpec, partitions: Sequence[str], engines: Sequence[str] = ("channel",),
             precision="auto", base=2) -> SimulationResult:
    dps = resolve_dps(spec, precision)
    parts = [resolve_partition(p, spec.n) for p in partitions]
    states, rows = {}, []
    for engine in engines:
        state = output_state(spec, engine, precision=dps or "float")
        states[engine] = state
        for res in partition_sweep(state, parts, base):
            rows.append(NegativityRow(res.partition.label, res.value, engine))
    disc = None
    if len(states) == 2:
        disc = frobenius_discrepancy(states["channel"], states["moment"])
    return SimulationResult(spec, states, tuple(rows), disc)


# --- sweeps ---------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    axes: dict
    fixed: dict
    partitions: tuple[str, ...]
    output_path: str | None = None
    parallelism: int = 1
    engines: tuple[str, ...] = ("channel",)
    precision: object = "auto"
    base: object = 2
    fit_axes: tuple[str, ...] = ()

    def grid(self) -> list[dict]:
        """Grid points in lexicographic order of ``n, d, r, t``."""
        names = [a for a in SWEEP_AXES if a in self.axes]
        points = []
        for combo in itertools.product(*(self.axes[a] for a in names)):
            point = dict(self.fixed)
            point.update(zip(names, combo))
            points.append(point)
        return points

    @property
    def size(self) -> int:
        return math.prod(len(v) for v in self.axes.values())


def sweep_config_from(cfg, output=None, jobs=None, base=2, both_engines=False) -> SweepConfig:
    if not cfg.has_section("network"):
        raise ConfigError("missing [network] section")
    net = cfg["network"]
    axes = {}
    if cfg.has_section("sweep"):
        for key, text in cfg["sweep"].items():
            if key == "fit":
                continue
            if key not in SWEEP_AXES:
                raise ConfigError(f"[sweep] {key}: unknown axis; expected one of {SWEEP_AXES}")
            axes[key] = parse_axis(key, text)
    defaults = {"n": None, "d": None, "r": "0", "theta": "0", "t": "1"}
    fixed = {}
    for key, default in defaults.items():
        if key in axes:
            continue
        if key not in net and default is None:
            raise ConfigError(f"[network] {key}: required key missing")
        fixed[key] = _number("network", key, net.get(key, default), int if key in ("n", "d") else float)
    if "theta" not in fixed:
        fixed["theta"] = 0.0
    grid_size = math.prod(len(v) for v in axes.values())
    if grid_size > MAX_GRID_POINTS:
        raise ResourceLimitError(f"sweep grid has {grid_size} points; the limit is {MAX_GRID_POINTS}")
    fit_text = cfg.get("sweep", "fit", fallback=None) if cfg.has_section("sweep") else None
    if fit_text is None:
        fit_axes = tuple(a for a in SWEEP_AXES if len(axes.get(a, ())) > 1)
    else:
        fit_axes = tuple(a.strip() for a in fit_text.split(",") if a.strip())
        for a in fit_axes:
            if a not in axes:
                raise ConfigError(f"[sweep] fit: {a!r} is not a sweep axis")
    partitions = tuple(partitions_from_config(cfg))
    out = output or cfg.get("output", "path", fallback=None)
    config = SweepConfig(
        axes=axes, fixed=fixed, partitions=partitions, output_path=out,
        parallelism=jobs or os.cpu_count() or 1,
        engines=ENGINES if both_engines else (engine_from_config(cfg),),
        precision=precision_from_config(cfg), base=base, fit_axes=fit_axes,
    )
    for point in config.grid():
        _validate_point(point, partitions)
    return config


def _validate_point(point: dict, partitions: Iterable[str]):
    n, d, r, t = point["n"], point["d"], point["r"], point["t"]
    if int(n) != n or n < 2 or n % 2:
        raise ConfigError(f"n: grid value {n} must be even and >= 2")
    if int(d) != d or d < 1:
        raise ConfigError(f"d: grid value {d} must be >= 1")
    if r < 0:
        raise ConfigError(f"r: grid value {r} must be >= 0")
    if not 0 <= t <= 1:
        raise ConfigError(f"t: grid value {t} must lie in [0, 1]")
    for p in partitions:
        resolve_partition(p, int(n))


@dataclass(frozen=True)
class SweepRow:
    n: int
    d: int
    r: float
    theta: float
    t: float
    partition: str
    value: float
    engine: str
    wall_time: float = field(default=0.0, compare=False)


def _evaluate_point(task) -> list[SweepRow]:
    point, partitions, engines, precision, base = task
    spec = NetworkSpec.uniform(point["n"], point["d"], point["r"], point["theta"], point["t"])
    start = time.perf_counter()
    result = simulate(spec, partitions, engines, precision, base)
    elapsed = time.perf_counter() - start
    # label rows by the partition as configured so fits can group across n
    per_engine = len(partitions)
    return [SweepRow(spec.n, spec.d, point["r"], point["theta"], point["t"],
                     partitions[i % per_engine], row.value, row.engine, elapsed)
            for i, row in enumerate(result.rows)]


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in grid order for any worker count."""
    tasks = [(p, config.partitions, config.engines, config.precision, config.base)
             for p in config.grid()]
    if config.parallelism <= 1 or len(tasks) <= 1:
        chunks = map(_evaluate_point, tasks)
        return [row for chunk in chunks for row in chunk]
    with ProcessPoolExecutor(max_workers=min(config.parallelism, len(tasks))) as pool:
        chunks = pool.map(_evaluate_point, tasks)
        return [row for chunk in chunks for row in chunk]


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def linear_fit(x: Sequence[float], y: Sequence[float]) -> LinearFit:
    """Ordinary least squares; ``r_squared`` is 1 for an exact fit of constant data."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    if len(x) < 2:
        raise ValueError("a linear fit needs at least two points")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else float("nan"))
    return LinearFit(slope, intercept, r2)


@dataclass(frozen=True)
class FitRow:
    axis: str
    group: dict
    partition: str
    engine: str
    fit: LinearFit


def fit_rows(rows: Sequence[SweepRow], fit_axes: Sequence[str]) -> list[FitRow]:
    """One fit per axis, partition, engine and combination of the other parameters.

    Along ``d`` only points with ``d >= n`` (full connectivity) enter the fit.
    """
    out = []
    for axis in fit_axes:
        groups: dict = {}
        for row in rows:
            if axis == "d" and row.d < row.n:
                continue
            key_params = {k: getattr(row, k) for k in ("n", "d", "r", "theta", "t") if k != axis}
            key = (tuple(key_params.items()), row.partition, row.engine)
            groups.setdefault(key, []).append(row)
        for (params, partition, engine), members in groups.items():
            if len(members) < 2:
                continue
            x = [getattr(m, axis) for m in members]
            y = [m.value for m in members]
            out.append(FitRow(axis, dict(params), partition, engine, linear_fit(x, y)))
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def sweep_csv(rows: Sequence[SweepRow], fits: Sequence[FitRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([r.n, r.d, _fmt(float(r.r)), _fmt(float(r.theta)), _fmt(float(r.t)),
                         r.partition, _fmt(r.value), r.engine, "", "", ""])
    for f in fits:
        cells = {k: _fmt(float(v)) if k in ("r", "theta", "t") else str(v) for k, v in f.group.items()}
        writer.writerow([cells.get("n", ""), cells.get("d", ""), cells.get("r", ""),
                         cells.get("theta", ""), cells.get("t", ""),
                         f"fit={f.axis}:{f.partition}", "", f.engine,
                         _fmt(f.fit.slope), _fmt(f.fit.intercept), _fmt(f.fit.r_squared)])
    return buf.getvalue()


def timing_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "d", "r", "t", "engine", "wall_time"])
    seen = set()
    for r in rows:
        key = (r.n, r.d, r.r, r.t, r.engine)
        if key not in seen:
            seen.add(key)
            writer.writerow([r.n, r.d, _fmt(float(r.r)), _fmt(float(r.t)), r.engine, f"{r.wall_time:.6f}"])
    return buf.getvalue()


# --- Gaussian channel demos ----------------------------------------------------------

DEMOS = ("loss-loss", "bs-loss", "sq-loss", "bloch-messiah")


@dataclass(frozen=True, eq=False)
class DemoReport:
    name: str
    first: tuple[str, np.ndarray, np.ndarray]
    second: tuple[str, np.ndarray, np.ndarray]
    max_diff: float
    tol: float
    notes: tuple[str, ...] = ()
    channels: tuple[GaussianChannel, ...] = ()

    @property
    def equal(self) -> bool:
        return self.max_diff <= self.tol

    def render(self) -> str:
        lines = [f"demo: {self.name}"]
        for label, x, y in (self.first, self.second):
            lines.append(f"[{label}]")
            lines.append("X =")
            lines.append(np.array2string(np.asarray(x), precision=12, max_line_width=200))
            lines.append("Y =")
            lines.append(np.array2string(np.asarray(y), precision=12, max_line_width=200))
        lines.extend(self.notes)
        verdict = "equal" if self.equal else "inequal"
        lines.append(f"verdict: {verdict} (max abs difference {self.max_diff:.3e})")
        return "\n".join(lines)


def channel_demo(name: str, eta: float | None = None, eta2: float | None = None,
                 r: float | None = None, theta: float | None = None) -> DemoReport:
    if name == "loss-loss":
        e1, e2 = eta if eta is not None else 0.8, eta2 if eta2 is not None else 0.9
        ab = compose(loss_channel(1, e2), loss_channel(1, e1))
        ba = compose(loss_channel(1, e1), loss_channel(1, e2))
        combined = loss_channel(1, e1 * e2)
        diff = max(np.max(np.abs(ab.x @ ab.x.T - combined.x @ combined.x.T)),
                   np.max(np.abs(ab.y - combined.y)), np.max(np.abs(ab.y - ba.y)))
        note = f"combined transmissivity: {float(ab.x[0, 0] ** 2)!r} (eta1 * eta2 = {e1 * e2!r})"
        return DemoReport(name, (f"loss({e1}) then loss({e2})", ab.x, ab.y),
                          (f"loss({e2}) then loss({e1})", ba.x, ba.y), float(diff), 1e-15,
                          (note,), (ab, ba, combined))
    if name in ("bs-loss", "sq-loss"):
        e = eta if eta is not None else 0.5
        rep = commutation_report(r if r is not None else 1.0,
                                 theta if theta is not None else math.pi / 3, e)
        comp = rep.beam_splitter if name == "bs-loss" else rep.squeezer
        notes = ()
        tol = 1e-12
        if name == "sq-loss":
            delta = rep.squeezer_y_delta
            notes = ("Y(loss first) - Y(loss last) =",
                     np.array2string(delta, precision=12),
                     "(1 - eta) (diag(e^2r, e^-2r) - I) =",
                     np.array2string(rep.expected_squeezer_y_delta, precision=12))
        return DemoReport(name, ("loss after element", comp.after.x, comp.after.y),
                          ("loss before element", comp.before.x, comp.before.y),
                          comp.max_diff, tol, notes, (comp.after, comp.before))
    if name == "bloch-messiah":
        rr = r if r is not None else 1.0
        b50, dmat = bloch_messiah_two_mode(rr)
        rebuilt = b50.m @ dmat.m @ b50.m.T
        target = two_mode_squeezer_xpxp(rr)
        diff = float(np.max(np.abs(rebuilt - target)))
        zero = np.zeros_like(target)
        return DemoReport(name, ("B50 D B50^T", rebuilt, zero), ("two-mode squeezer S(r)", target, zero),
                          diff, 1e-12, (f"r = {rr!r}",))
    raise ConfigError(f"unknown demo {name!r}; expected one of {DEMOS}")

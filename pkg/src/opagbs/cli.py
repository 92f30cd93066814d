"""``opagbs`` command line: simulate | sweep | hafnian | sample | channels.

Exit codes: 0 success, 2 configuration or input error, 3 I/O error,
4 resource guard exceeded.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .exceptions import NumericalError, ResourceLimitError, UnphysicalStateError
from .experiments import (
    DEMOS,
    ConfigError,
    channel_demo,
    engine_from_config,
    fit_rows,
    network_from_config,
    partitions_from_config,
    precision_from_config,
    read_config,
    run_sweep,
    simulate,
    sweep_config_from,
    sweep_csv,
    timing_csv,
)
from .hafnian import hafnian
from .loss_channels import output_state
from .sampling import (
    build_w,
    enumerate_distribution,
    read_matrix_csv,
    sample_patterns,
    write_matrix_csv,
    write_samples,
)

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_RESOURCE = 0, 2, 3, 4
log = logging.getLogger("opagbs")

CONFIG_HELP = """\
config keys (INI sections):
  [network]        n, d (required); r, theta, t (uniform values); partitions
                   (";"-separated: "(5,3)", "equal", "interleaved", "1 3 | 2 4");
                   engine = channel | moment; precision = auto | float | <digits>
  [opa]            "layer,position = r[, theta]" overrides
  [transmittance]  "layer,mode = t" overrides (amplitude transmittance)
  [sweep]          axes n, d, r, t as "a, b, c" or "start:stop[:step]";
                   fit = comma-separated axes to fit linearly
  [sample]         max_total, count
  [output]         path (sweep CSV / samples CSV / covariance CSV)
"""


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _common(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", metavar="PATH", default=default(None), help="INI config file")
    p.add_argument("--output", metavar="PATH", default=default(None), help="output file")
    p.add_argument("--jobs", type=int, metavar="N", default=default(None),
                   help="worker processes (default: logical cores)")
    p.add_argument("--seed", type=_seed, metavar="U64", default=default(0), help="RNG seed")
    p.add_argument("--log-base", choices=("2", "e"), default=default("2"),
                   help="logarithm base of the negativity")
    p.add_argument("--both-engines", action="store_true", default=default(False),
                   help="run the channel and the operator-moment engine")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opagbs", parents=[_common(False)], epilog=CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Entanglement and photon statistics of lossy OPA networks.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(True)
    kw = dict(parents=[common], epilog=CONFIG_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)

    sub.add_parser("simulate", help="covariance and negativity at one network point", **kw)
    sub.add_parser("sweep", help="negativity over a parameter grid, with linear fits", **kw)

    h = sub.add_parser("hafnian", help="Hafnian of a symmetric matrix stored as CSV", **kw)
    h.add_argument("matrix", help="CSV file, one row per line")
    h.add_argument("--algorithm", choices=("brute", "fast"), default="fast")

    s = sub.add_parser("sample", help="draw photon patterns by enumeration", **kw)
    s.add_argument("--max-total", type=int, default=None, help="photon budget of the enumeration")
    s.add_argument("--count", type=int, default=None, help="number of samples")
    s.add_argument("--distribution", metavar="PATH", help="also export the enumerated distribution")

    c = sub.add_parser("channels", help="loss ordering and Bloch-Messiah demos", **kw)
    c.add_argument("--demo", required=True, help=f"one of {', '.join(DEMOS)}")
    c.add_argument("--eta", type=float, help="transmissivity (loss-loss: first element)")
    c.add_argument("--eta2", type=float, help="second transmissivity (loss-loss)")
    c.add_argument("--r", type=float, help="squeezing")
    c.add_argument("--theta", type=float, help="beam-splitter angle")
    return parser


def _base(args):
    return "e" if args.log_base == "e" else 2


def _need_config(args):
    if not args.config:
        raise ConfigError("--config: a config file is required for this command")
    return read_config(args.config)


def cmd_simulate(args) -> int:
    cfg = _need_config(args)
    spec = network_from_config(cfg)
    engines = ("channel", "moment") if args.both_engines else (engine_from_config(cfg),)
    partitions = partitions_from_config(cfg, spec.n)
    result = simulate(spec, partitions, engines, precision_from_config(cfg), _base(args))
    out = args.output or cfg.get("output", "path", fallback="covariance.csv")
    write_matrix_csv(next(iter(result.states.values())).as_float(), out)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["partition", "E_N", "engine"])
    for row in result.rows:
        writer.writerow([row.partition, repr(row.value), row.engine])
    if result.discrepancy is not None:
        print(f"engine_discrepancy_frobenius={result.discrepancy!r}")
    log.info("covariance written to %s", out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _need_config(args)
    config = sweep_config_from(cfg, args.output, args.jobs, _base(args), args.both_engines)
    rows = run_sweep(config)
    text = sweep_csv(rows, fit_rows(rows, config.fit_axes))
    if config.output_path:
        out = Path(config.output_path)
        out.write_text(text)
        Path(str(out) + ".timing.csv").write_text(timing_csv(rows))
        log.info("%d rows written to %s", len(rows), out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_hafnian(args) -> int:
    try:
        m = read_matrix_csv(args.matrix)
    except ValueError as exc:
        raise ConfigError(f"matrix: {exc}") from None
    value = hafnian(m, args.algorithm)
    print(repr(value))
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = _need_config(args)
    spec = network_from_config(cfg)
    max_total = args.max_total if args.max_total is not None else cfg.getint("sample", "max_total", fallback=8)
    count = args.count if args.count is not None else cfg.getint("sample", "count", fallback=1000)
    if count < 0:
        raise ConfigError("--count: must be >= 0")
    state = output_state(spec, precision=precision_from_config(cfg))
    dist = enumerate_distribution(build_w(state), max_total)
    samples = sample_patterns(dist, count, args.seed)
    out = args.output or cfg.get("output", "path", fallback="samples.csv")
    write_samples(samples, out)
    if args.distribution:
        dist.to_csv(args.distribution)
    print(f"residual_mass={dist.residual!r}")
    return EXIT_OK


def cmd_channels(args) -> int:
    report = channel_demo(args.demo, args.eta, args.eta2, args.r, args.theta)
    print(report.render())
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "hafnian": cmd_hafnian,
    "sample": cmd_sample,
    "channels": cmd_channels,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, UnphysicalStateError, NumericalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

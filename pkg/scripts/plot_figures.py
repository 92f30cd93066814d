"""Plot negativity curves from ``opagbs sweep`` CSV files.

Usage::

    opagbs sweep --config configs/fig2a.ini --output fig2a.csv
    python3 scripts/plot_figures.py fig2a.csv --x d --out fig2a.png

One line is drawn per (partition, engine, other swept parameter) group.
Requires matplotlib, which the package itself does not depend on.
"""
import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

PARAMS = ("n", "d", "r", "theta", "t")


def load(path):
    with open(path, newline="") as fh:
        return [row for row in csv.DictReader(fh) if not row["partition"].startswith("fit=")]


def groups(rows, x):
    varying = [p for p in PARAMS if p != x and len({r[p] for r in rows}) > 1]
    out = defaultdict(list)
    for row in rows:
        label = [row["partition"]] + [f"{p}={row[p]}" for p in varying]
        if len({r["engine"] for r in rows}) > 1:
            label.append(row["engine"])
        out[", ".join(label)].append((float(row[x]), float(row["E_N"])))
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("csv")
    parser.add_argument("--x", choices=("n", "d", "r", "t"), required=True, help="horizontal axis")
    parser.add_argument("--out", required=True, help="image path")
    args = parser.parse_args(argv)

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, points in sorted(groups(load(args.csv), args.x).items()):
        points.sort()
        ax.plot(*zip(*points), marker="o", markersize=3, label=label)
    ax.set_xlabel(args.x)
    ax.set_ylabel("E_N (bits)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()

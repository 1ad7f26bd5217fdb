#!/usr/bin/env python3
"""Plot sweep CSVs produced by the sirp-radar CLI.

Picks the plot style from the columns: estimator sweeps get MSE-vs-axis
curves with the spacing bound overlaid, bound sweeps get one curve per
bound, resolution sweeps get the three spacing-limit variants.  One PNG is
written next to each CSV.
"""

import argparse
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as handle:
        rows = list(csv.DictReader(handle))
    if not rows:
        raise SystemExit(f"{path}: empty sweep file")
    names = list(rows[0])
    data = {name: [float(row[name]) for row in rows] for name in names}
    return names[0], data


def plot_file(path):
    axis, data = read_csv(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    mse_cols = [name for name in data if name.startswith("mse_")]
    if mse_cols:
        for name in mse_cols:
            ax.semilogy(data[axis], data[name], marker="o", label=name.removeprefix("mse_"))
        if "crb" in data:
            ax.semilogy(data[axis], data["crb"], "k--", label="crb")
        ax.set_ylabel("spacing MSE")
    elif "delta_exact" in data:
        for name in ("delta_exact", "delta_closed", "delta_asym"):
            ax.plot(data[axis], data[name], marker="o", label=name)
        ax.set_ylabel("resolution limit")
    else:
        for name in data:
            if name != axis:
                ax.semilogy(data[axis], data[name], marker="o", label=name)
        ax.set_ylabel("spacing bound")
    ax.set_xlabel(axis)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out = path.with_suffix(".png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("paths", nargs="+", type=Path,
                        help="sweep CSV files, or directories to scan for them")
    args = parser.parse_args(argv)
    files = []
    for path in args.paths:
        files.extend(sorted(path.glob("*.csv")) if path.is_dir() else [path])
    if not files:
        print("no CSV files found", file=sys.stderr)
        return 2
    for path in files:
        print(f"wrote {plot_file(path)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

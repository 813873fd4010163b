#!/usr/bin/env python3
"""Render a sweep CSV using its plot-description sidecar.

Usage: plot_sweep.py SWEEP.csv.plot.json [OUT.png]

The plot description is self-contained ({x, series, scale, csv, title});
this script is a convenience renderer, not part of the output contract.
"""

import csv
import json
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__, file=sys.stderr)
        return 2
    spec_path = pathlib.Path(sys.argv[1])
    out_path = pathlib.Path(sys.argv[2]) if len(sys.argv) > 2 else spec_path.with_suffix(".png")
    spec = json.loads(spec_path.read_text())

    csv_path = spec_path.parent / spec["csv"]
    rows = list(csv.DictReader(csv_path.open()))
    xs = [float(r[spec["x"]]) for r in rows]

    fig, ax = plt.subplots(figsize=(6, 4))
    styles = {"rate": "o-", "bound_upper": "s--", "bound_lower": "^--"}
    for series in spec["series"]:
        pts = [(x, float(r[series])) for x, r in zip(xs, rows) if r.get(series)]
        if pts:
            ax.plot(*zip(*pts), styles.get(series, "-"), label=series)
    if spec.get("scale") == "log-y":
        ax.set_yscale("log")
    ax.set_xlabel(spec["x"])
    ax.set_ylabel("probability of erroneous identification")
    ax.set_title(spec.get("title", ""))
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Sweep the circular-law experiment over matrix sizes and plot the trend.

For each size the median radial/angular sup distances to the unit-disk law
are recorded; the scatter of the largest run is saved alongside the trend.

Usage: python scripts/circlaw_sweep.py [--out-dir out] [--dist rademacher]
       [--trials 10] [--seed 1] [--sizes 256,512,1024]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import bandlab as bl  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--dist", default="rademacher",
                    choices=["gaussian", "cgaussian", "uniform", "rademacher"])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--sizes", default="256,512,1024", help="comma separated n values (w = n/16)")
    args = ap.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    sizes = [int(s) for s in args.sizes.split(",")]
    medians = []
    last_report = None
    for n in sizes:
        cfg = bl.ExperimentConfig(
            kind="circlaw", n=n, w=n // 16, profile="block", dist=args.dist,
            trials=args.trials, seed=args.seed,
        )
        report = bl.run(cfg)
        bl.emit_csv(report, out_dir / f"circlaw_n{n}.csv")
        medians.append((n, report.aggregates["radial_ks_median"], report.aggregates["angular_ks_median"]))
        last_report = report
        print(f"n={n:5d} radial_median={medians[-1][1]:.4f} angular_median={medians[-1][2]:.4f}")

    bl.emit_plot(last_report, out_dir / f"circlaw_scatter_n{sizes[-1]}.png")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [m[0] for m in medians]
    fig, ax = plt.subplots()
    ax.loglog(ns, [m[1] for m in medians], "o-", label="radial")
    ax.loglog(ns, [m[2] for m in medians], "s-", label="angular")
    ax.set_xlabel("n")
    ax.set_ylabel("median sup distance to disk law")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "circlaw_trend.png", dpi=120)
    print(f"trend plot -> {out_dir / 'circlaw_trend.png'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

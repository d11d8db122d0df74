#!/usr/bin/env python3
"""Run every experiment kind once at desk scale and drop CSVs + plots in out/.

Usage: python scripts/run_suite.py [--out-dir out] [--seed 1] [--quick]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import bandlab as bl  # noqa: E402


def suite(seed: int, quick: bool) -> list[bl.ExperimentConfig]:
    n, trials = (256, 5) if quick else (512, 20)
    w = max(2, int(round(n**0.6 / 8)) * 8)
    return [
        bl.ExperimentConfig(kind="circlaw", n=n, w=n // 16, profile="block", dist="rademacher",
                            trials=trials, seed=seed),
        bl.ExperimentConfig(kind="locallaw", n=n, w=w, dist="gaussian", trials=trials, seed=seed),
        bl.ExperimentConfig(kind="singcount", n=n, w=w, dist="gaussian", trials=trials, seed=seed),
        bl.ExperimentConfig(kind="leastsing", n=n, w=w, dist="uniform", trials=trials, seed=seed),
        bl.ExperimentConfig(kind="replacement", n=n, w=w, dist="uniform", trials=trials, seed=seed),
        bl.ExperimentConfig(kind="normcond", n=n, w=int(np.ceil(np.sqrt(n))), seed=seed),
        bl.ExperimentConfig(kind="mc", z=0.5, eta_points=60, eta_min=1e-6),
    ]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--quick", action="store_true", help="smaller n and fewer trials")
    args = ap.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for cfg in suite(args.seed, args.quick):
        report = bl.run(cfg)
        csv_path = out_dir / f"{cfg.kind}.csv"
        png_path = out_dir / f"{cfg.kind}.png"
        bl.emit_csv(report, csv_path)
        bl.emit_plot(report, png_path)
        print(f"{cfg.kind:12s} rows={len(report.rows):4d} elapsed={report.elapsed_s:6.1f}s -> {csv_path}")
        for key in sorted(report.aggregates):
            print(f"    {key} = {report.aggregates[key]:.6g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

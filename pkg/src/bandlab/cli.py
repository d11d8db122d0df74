"""Command line front end: ``bandlab <kind> [flags]``.

Flags may also come from a JSON file via --config (keys match flag names,
with - or _ separators); explicit flags override file values.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import KINDS, ExperimentConfig, emit_csv, emit_plot, run, validate_config

_FLAG_SPEC = [
    # (name, type, help)
    ("n", int, "matrix dimension"),
    ("w", int, "bandwidth"),
    ("profile", str, "variance profile: block | circulant"),
    ("f", str, "circulant weight function: indicator | gauss"),
    ("dist", str, "entry law: gaussian | cgaussian | uniform | rademacher"),
    ("z-re", float, "real part of the shift z"),
    ("z-im", float, "imaginary part of the shift z"),
    ("trials", int, "number of Monte-Carlo trials"),
    ("seed", int, "base seed; trial t uses seed + t"),
    ("eta-min", float, "lower edge of the eta grid (default w^-2 n^gamma0)"),
    ("eta-max", float, "upper edge of the eta grid"),
    ("eta-points", int, "points in the geometric eta grid"),
    ("gamma0", float, "spectral-domain exponent"),
    ("kappa", float, "least-singular-value exponent"),
    ("radius", float, "norm-condition scan radius"),
    ("out", str, "CSV output path"),
    ("plot", str, "plot output path (png)"),
]

_CHOICES = {
    "profile": ("block", "circulant"),
    "f": ("indicator", "gauss"),
    "dist": ("gaussian", "cgaussian", "uniform", "rademacher"),
}

_POSITIVE = {"n", "w", "trials", "eta-points"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bandlab", description=__doc__)
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run the {kind} experiment")
        sp.add_argument("--config", type=str, default=None, help="JSON config file")
        for name, typ, help_text in _FLAG_SPEC:
            sp.add_argument(
                f"--{name}",
                type=typ,
                default=None,
                choices=_CHOICES.get(name),
                help=help_text,
            )
    return parser


def parse_cli(args: list[str]) -> ExperimentConfig:
    """Parse argv-style arguments into a validated ExperimentConfig."""
    parser = _build_parser()
    ns = parser.parse_args(args)

    values: dict = {}
    if ns.config is not None:
        with open(ns.config) as fh:
            raw = json.load(fh)
        for key, val in raw.items():
            values[key.replace("-", "_")] = val
    for name, _typ, _help in _FLAG_SPEC:
        flag_val = getattr(ns, name.replace("-", "_"))
        if flag_val is not None:
            values[name.replace("-", "_")] = flag_val

    for name in _POSITIVE:
        key = name.replace("-", "_")
        if key in values and values[key] < 1:
            parser.error(f"--{name} must be >= 1, got {values[key]}")
    if "eta_min" in values and values["eta_min"] is not None and values["eta_min"] <= 0:
        parser.error(f"--eta-min must be positive, got {values['eta_min']}")
    unknown = set(values) - {"kind", "z_re", "z_im"} - {n.replace("-", "_") for n, _, _ in _FLAG_SPEC}
    if unknown:
        parser.error(f"unknown config keys: {sorted(unknown)}")

    z = complex(values.pop("z_re", 0.5), values.pop("z_im", 0.0))
    cfg = ExperimentConfig(kind=ns.kind, z=z, **values)
    validate_config(cfg)
    return cfg


def main(argv: list[str] | None = None) -> int:
    cfg = parse_cli(sys.argv[1:] if argv is None else argv)
    report = run(cfg)
    if cfg.out:
        emit_csv(report, cfg.out)
        print(f"wrote {len(report.rows)} rows to {cfg.out}")
    if cfg.plot:
        emit_plot(report, cfg.plot)
        print(f"wrote plot to {cfg.plot}")
    print(f"{cfg.kind}: n={cfg.n} w={cfg.w} trials={cfg.trials} elapsed={report.elapsed_s:.2f}s")
    for key in sorted(report.aggregates):
        print(f"  {key} = {report.aggregates[key]:.6g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

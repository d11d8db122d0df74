"""Monte-Carlo experiment drivers behind the bandlab CLI.

Each experiment kind samples band matrices (or scans a deterministic
profile), computes its per-trial statistics, and aggregates them into a
report destined for CSV and plots. Runs are deterministic: trial t draws
from seed + t, so parallel and serial execution agree.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import ensemble, spectra
from .errors import (
    BandlabError,
    HypothesisCompatibilityError,
)
from .profile import (
    PROFILE_FUNCTIONS,
    VarianceProfile,
    build_block_band,
    build_circulant,
    scan_norm_condition,
)
from .selfconsistent import mc_curve

_SPOT_XOR = 0xC2B2AE3D27D4EB4F  # decorrelates entry-spot index draws from matrix draws

COLUMNS = {
    "circlaw": ["trial", "seed", "radial_ks", "angular_ks", "status"],
    "locallaw": ["trial", "eta", "abs_err", "normalized_err", "entry_spot_max", "status"],
    "singcount": ["trial", "count", "bound", "status"],
    "leastsing": ["trial", "sigma_min", "thresh_2_10", "thresh_2_3", "status"],
    "replacement": ["trial", "delta", "ks", "status"],
    "normcond": ["y1_re", "y1_im", "y2_re", "y2_im", "norm", "method", "status"],
    "mc": ["eta", "mc_re", "mc_im", "residual"],
}

KINDS = tuple(COLUMNS)

# kinds whose target statements assume a bounded entry density; the block
# profile versions have their own density-free statement
_DENSITY_REQUIRED = frozenset({"circlaw", "leastsing"})


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: int = 256
    w: int = 16
    profile: str = "circulant"  # block | circulant
    f: str = "indicator"
    dist: str = "gaussian"  # gaussian | cgaussian | uniform | rademacher
    z: complex = 0.5 + 0.0j
    trials: int = 10
    seed: int = 1
    eta_min: float | None = None  # None: the w**-2 n**gamma0 lower edge
    eta_max: float = 10.0
    eta_points: int = 20
    gamma0: float = 0.1
    kappa: float = 0.05
    radius: float = 0.02
    grid_points: int = 3
    epsilon: float = 0.1  # report-time exponent for count bounds
    locallaw_bound: float = 10.0
    out: str | None = None
    plot: str | None = None

    @property
    def thresholds(self) -> dict[str, float]:
        return {"gamma0": self.gamma0, "kappa": self.kappa, "radius": self.radius}

    def distribution(self) -> ensemble.EntryDistribution:
        try:
            return ensemble.DISTRIBUTION_ALIASES[self.dist]
        except KeyError:
            raise ValueError(f"unknown distribution {self.dist!r}") from None

    def eta_grid(self) -> np.ndarray:
        """Geometric grid, descending (continuation order)."""
        lo = self.eta_min if self.eta_min is not None else self.w**-2.0 * self.n**self.gamma0
        return np.geomspace(self.eta_max, lo, self.eta_points)

    def build_profile(self) -> VarianceProfile:
        if self.profile == "block":
            return build_block_band(self.n, self.w)
        if self.profile == "circulant":
            return build_circulant(self.n, self.w, PROFILE_FUNCTIONS[self.f])
        raise ValueError(f"unknown profile {self.profile!r}")


def validate_config(cfg: ExperimentConfig) -> None:
    """Raise before any trial runs if the config is unusable."""
    if cfg.kind not in KINDS:
        raise ValueError(f"unknown experiment kind {cfg.kind!r}")
    if cfg.n < 1 or cfg.w < 1:
        raise ValueError(f"n={cfg.n} and w={cfg.w} must be >= 1")
    if cfg.w > cfg.n:
        raise ValueError(f"bandwidth w={cfg.w} exceeds n={cfg.n}")
    if cfg.trials < 1:
        raise ValueError(f"trials={cfg.trials} must be >= 1")
    if cfg.eta_min is not None and cfg.eta_min <= 0:
        raise ValueError(f"eta_min={cfg.eta_min} must be positive")
    if cfg.f not in PROFILE_FUNCTIONS:
        raise ValueError(f"unknown profile function {cfg.f!r}")
    if cfg.kind in _DENSITY_REQUIRED:
        dist = cfg.distribution()
        if not dist.bounded_density and cfg.profile != "block":
            raise HypothesisCompatibilityError(
                f"{cfg.kind} with a {cfg.profile} profile needs a bounded entry density; "
                f"{dist.tag} has none (use --profile block or a continuous distribution)"
            )


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    columns: tuple[str, ...]
    rows: tuple[dict, ...]
    aggregates: dict[str, float]
    elapsed_s: float = 0.0

    @property
    def config_echo(self) -> dict:
        echo = asdict(self.config)
        echo["z"] = repr(self.config.z)
        return echo


def _trial_loop(cfg: ExperimentConfig, one_trial) -> list[dict]:
    """Run one_trial(trial, seed) for each trial, capturing failures as rows."""
    rows: list[dict] = []
    for t in range(cfg.trials):
        seed = cfg.seed + t
        try:
            rows.extend(one_trial(t, seed))
        except (BandlabError, np.linalg.LinAlgError) as exc:
            rows.append({"trial": t, "status": f"failed: {exc}"})
    return rows


def _run_circlaw(cfg: ExperimentConfig) -> list[dict]:
    profile = cfg.build_profile()
    dist = cfg.distribution()

    def one_trial(t, seed):
        x = ensemble.sample(profile, dist, seed)
        eigs = spectra.eigenvalues(x.matrix)
        radial, angular = spectra.circular_law_distance(eigs)
        return [
            {
                "trial": t,
                "seed": seed,
                "radial_ks": radial,
                "angular_ks": angular,
                "status": "ok",
            }
        ]

    return _trial_loop(cfg, one_trial)


def _spot_pairs(seed: int, n: int, count: int = 16) -> tuple[np.ndarray, np.ndarray]:
    gen = np.random.Generator(np.random.Philox(key=np.uint64((seed ^ _SPOT_XOR) & (2**64 - 1))))
    idx = gen.integers(0, n, size=(2, count))
    return idx[0], idx[1]


def _run_locallaw(cfg: ExperimentConfig) -> list[dict]:
    profile = cfg.build_profile()
    dist = cfg.distribution()
    etas = cfg.eta_grid()
    mc_by_eta = {s.w.imag: s.mc for s in mc_curve(cfg.z, etas)}

    def one_trial(t, seed):
        x = ensemble.sample(profile, dist, seed)
        y = ensemble.shifted(x, cfg.z)
        _, svals_desc, vh = np.linalg.svd(y)
        rows_i, rows_j = _spot_pairs(seed, cfg.n)
        vi = vh[:, rows_i].conj()
        vj = vh[:, rows_j]
        out = []
        for eta in etas:
            mc = mc_by_eta[eta]
            res = 1.0 / (svals_desc**2 - 1j * eta)
            m_emp = complex(res.mean())
            abs_err = abs(m_emp - mc)
            spots = (vi * vj * res[:, None]).sum(axis=0)
            spots -= mc * (rows_i == rows_j)
            out.append(
                {
                    "trial": t,
                    "eta": float(eta),
                    "abs_err": abs_err,
                    "normalized_err": abs_err * np.sqrt(cfg.w) * eta**0.75,
                    "entry_spot_max": float(np.max(np.abs(spots))),
                    "status": "ok",
                }
            )
        return out

    return _trial_loop(cfg, one_trial)


def _run_singcount(cfg: ExperimentConfig) -> list[dict]:
    profile = cfg.build_profile()
    dist = cfg.distribution()
    etas = cfg.eta_grid()
    bound = cfg.n ** (1.0 + cfg.epsilon) / cfg.w

    def one_trial(t, seed):
        x = ensemble.sample(profile, dist, seed)
        svals = spectra.singular_values(ensemble.shifted(x, cfg.z))
        count = spectra.count_small_singulars(svals, 1.0 / cfg.w)
        status = "ok"
        for eta in etas:
            lhs = spectra.count_small_singulars(svals, np.sqrt(eta))
            rhs = 4.0 * cfg.n * eta * spectra.empirical_stieltjes(svals, eta).imag
            if lhs > rhs:
                status = f"stieltjes_violation: eta={eta:.3e}"
                break
        return [{"trial": t, "count": count, "bound": bound, "status": status}]

    return _trial_loop(cfg, one_trial)


def _run_leastsing(cfg: ExperimentConfig) -> list[dict]:
    profile = cfg.build_profile()
    dist = cfg.distribution()
    length = cfg.n / cfg.w
    thresh_2_10 = float(np.exp(-(cfg.n ** (3.0 * cfg.kappa)) * length))
    thresh_2_3 = float(np.exp(-50.0 * length * np.log(cfg.w))) if cfg.profile == "block" else None
    # each tail bound is only asserted where its hypotheses hold: the general
    # bound needs a bounded entry density, the sharper one a block profile
    check_2_10 = dist.bounded_density

    def one_trial(t, seed):
        x = ensemble.sample(profile, dist, seed)
        svals = spectra.singular_values(ensemble.shifted(x, cfg.z))
        sigma_min = spectra.least_singular(svals)
        status = "ok"
        if check_2_10 and sigma_min <= thresh_2_10:
            status = "below_2_10"
        elif thresh_2_3 is not None and sigma_min <= thresh_2_3:
            status = "below_2_3"
        return [
            {
                "trial": t,
                "sigma_min": sigma_min,
                "thresh_2_10": thresh_2_10,
                "thresh_2_3": thresh_2_3 if thresh_2_3 is not None else "",
                "status": status,
            }
        ]

    return _trial_loop(cfg, one_trial)


def _run_replacement(cfg: ExperimentConfig) -> list[dict]:
    profile = cfg.build_profile()
    dist = cfg.distribution()

    def one_trial(t, seed):
        x = ensemble.sample(profile, dist, seed)
        g = ensemble.gaussian_companion(x)
        svals_x = spectra.singular_values(ensemble.shifted(x, cfg.z))
        svals_g = spectra.singular_values(ensemble.shifted(g, cfg.z))
        delta = abs(spectra.log_det_avg(svals_x) - spectra.log_det_avg(svals_g))
        ks = spectra.kolmogorov_distance(svals_x, svals_g)
        return [{"trial": t, "delta": delta, "ks": ks, "status": "ok"}]

    return _trial_loop(cfg, one_trial)


def _run_normcond(cfg: ExperimentConfig) -> list[dict]:
    profile = cfg.build_profile()
    report = scan_norm_condition(profile, cfg.z, cfg.radius, cfg.grid_points)
    rows = []
    for (y1, y2), norm, status in zip(report.grid, report.norms, report.statuses):
        rows.append(
            {
                "y1_re": y1.real,
                "y1_im": y1.imag,
                "y2_re": y2.real,
                "y2_im": y2.imag,
                "norm": norm,
                "method": report.method,
                "status": status,
            }
        )
    return rows


def _run_mc(cfg: ExperimentConfig) -> list[dict]:
    sols = mc_curve(cfg.z, cfg.eta_grid())
    return [
        {
            "eta": s.w.imag,
            "mc_re": s.mc.real,
            "mc_im": s.mc.imag,
            "residual": s.residual,
        }
        for s in sols
    ]


_RUNNERS = {
    "circlaw": _run_circlaw,
    "locallaw": _run_locallaw,
    "singcount": _run_singcount,
    "leastsing": _run_leastsing,
    "replacement": _run_replacement,
    "normcond": _run_normcond,
    "mc": _run_mc,
}


def _aggregate(cfg: ExperimentConfig, rows: Sequence[dict]) -> dict[str, float]:
    agg: dict[str, float] = {}
    for col in COLUMNS[cfg.kind]:
        if col in ("trial", "seed", "status", "method"):
            continue
        vals = [
            float(r[col])
            for r in rows
            if isinstance(r.get(col), (int, float)) and np.isfinite(r[col])
        ]
        if vals:
            agg[f"{col}_median"] = float(np.median(vals))
            agg[f"{col}_mean"] = float(np.mean(vals))
            agg[f"{col}_min"] = float(np.min(vals))
            agg[f"{col}_max"] = float(np.max(vals))
    oks = sum(1 for r in rows if str(r.get("status", "ok")).startswith(("ok", "upper_bound")))
    agg["ok_fraction"] = oks / len(rows) if rows else float("nan")

    if cfg.kind == "locallaw":
        by_trial: dict[int, bool] = {}
        for r in rows:
            t = r.get("trial")
            ok = r.get("status") == "ok" and r.get("normalized_err", np.inf) <= cfg.locallaw_bound
            by_trial[t] = by_trial.get(t, True) and ok
        if by_trial:
            agg["trial_bound_pass_fraction"] = sum(by_trial.values()) / len(by_trial)
    elif cfg.kind == "singcount":
        good = [r for r in rows if "count" in r]
        if good:
            agg["count_le_bound_fraction"] = np.mean([r["count"] <= r["bound"] for r in good])
            agg["stieltjes_pass_fraction"] = np.mean([r["status"] == "ok" for r in good])
    elif cfg.kind == "leastsing":
        good = [r for r in rows if "sigma_min" in r]
        if good:
            agg["above_2_10_fraction"] = np.mean([r["sigma_min"] > r["thresh_2_10"] for r in good])
            blocks = [r for r in good if r["thresh_2_3"] != ""]
            if blocks:
                agg["above_2_3_fraction"] = np.mean([r["sigma_min"] > r["thresh_2_3"] for r in blocks])
    elif cfg.kind == "normcond":
        finite = [r["norm"] for r in rows if np.isfinite(r["norm"])]
        if finite:
            agg["max_norm"] = float(max(finite))
            agg["max_norm_per_log_sq"] = float(max(finite)) / np.log(cfg.n) ** 2
    return agg


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """Execute one experiment; deterministic up to the timing field."""
    validate_config(cfg)
    start = time.perf_counter()
    rows = _RUNNERS[cfg.kind](cfg)
    elapsed = time.perf_counter() - start
    return ExperimentReport(
        config=cfg,
        columns=tuple(COLUMNS[cfg.kind]),
        rows=tuple(rows),
        aggregates=_aggregate(cfg, rows),
        elapsed_s=elapsed,
    )


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip decimal, numpy scalars included
    if value is None:
        return ""
    return str(value)


def emit_csv(report: ExperimentReport, path) -> None:
    """Write the per-row table with full round-trip float precision."""
    import csv

    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(report.columns)
            for row in report.rows:
                writer.writerow([_format_cell(row.get(col, "")) for col in report.columns])
    except OSError as exc:
        raise OSError(f"cannot write experiment CSV to {path}: {exc}") from exc


def emit_plot(report: ExperimentReport, path) -> None:
    """One figure per experiment kind: eigenvalue scatter for circlaw,
    error-vs-eta for locallaw, transform curve for mc, histograms otherwise."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cfg = report.config
    fig, ax = plt.subplots(figsize=(6, 5))
    try:
        if cfg.kind == "circlaw":
            x = ensemble.sample(cfg.build_profile(), cfg.distribution(), cfg.seed)
            eigs = spectra.eigenvalues(x.matrix)
            ax.scatter(eigs.real, eigs.imag, s=4, alpha=0.6)
            theta = np.linspace(0, 2 * np.pi, 400)
            ax.plot(np.cos(theta), np.sin(theta), "k--", lw=1)
            ax.set_aspect("equal")
            ax.set_title(f"eigenvalues, n={cfg.n}, w={cfg.w}, trial 0")
        elif cfg.kind == "locallaw":
            etas = sorted({r["eta"] for r in report.rows if "eta" in r})
            med = [
                np.median([r["abs_err"] for r in report.rows if r.get("eta") == e])
                for e in etas
            ]
            ax.loglog(etas, med, "o-", label="median |m - m_c|")
            ref = [cfg.w**-0.5 * e**-0.75 for e in etas]
            ax.loglog(etas, ref, "k--", label="w^-1/2 eta^-3/4")
            ax.set_xlabel("eta")
            ax.legend()
        elif cfg.kind == "mc":
            etas = [r["eta"] for r in report.rows]
            ax.semilogx(etas, [r["mc_re"] for r in report.rows], label="Re m_c")
            ax.semilogx(etas, [r["mc_im"] for r in report.rows], label="Im m_c")
            ax.set_xlabel("eta")
            ax.legend()
        else:
            key = {
                "singcount": "count",
                "leastsing": "sigma_min",
                "replacement": "delta",
                "normcond": "norm",
            }[cfg.kind]
            vals = [r[key] for r in report.rows if isinstance(r.get(key), (int, float)) and np.isfinite(r[key])]
            ax.hist(vals, bins=min(30, max(5, len(vals) // 2 + 1)))
            ax.set_xlabel(key)
            ax.set_title(f"{cfg.kind}, n={cfg.n}, w={cfg.w}")
        fig.tight_layout()
        fig.savefig(path, dpi=120)
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc
    finally:
        plt.close(fig)

import csv
import json

import numpy as np
import pytest

import bandlab as bl
from bandlab.cli import main, parse_cli
from bandlab.errors import HypothesisCompatibilityError
from bandlab.experiments import COLUMNS, validate_config


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfigValidation:
    def test_bandwidth_cannot_exceed_n(self):
        with pytest.raises(ValueError):
            validate_config(bl.ExperimentConfig(kind="circlaw", n=16, w=32))

    def test_positive_trials(self):
        with pytest.raises(ValueError):
            validate_config(bl.ExperimentConfig(kind="mc", trials=0))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            validate_config(bl.ExperimentConfig(kind="nonsense"))

    def test_unknown_distribution(self):
        with pytest.raises(ValueError):
            validate_config(bl.ExperimentConfig(kind="circlaw", dist="cauchy"))

    def test_density_guard_circulant_leastsing(self):
        cfg = bl.ExperimentConfig(kind="leastsing", dist="rademacher", profile="circulant")
        with pytest.raises(HypothesisCompatibilityError):
            validate_config(cfg)

    def test_density_guard_circulant_circlaw(self):
        cfg = bl.ExperimentConfig(kind="circlaw", dist="rademacher", profile="circulant")
        with pytest.raises(HypothesisCompatibilityError):
            validate_config(cfg)

    def test_block_profile_lifts_density_requirement(self):
        validate_config(bl.ExperimentConfig(kind="circlaw", n=64, w=8, dist="rademacher", profile="block"))
        validate_config(bl.ExperimentConfig(kind="leastsing", n=64, w=8, dist="rademacher", profile="block"))

    def test_thresholds_map(self):
        cfg = bl.ExperimentConfig(kind="mc", gamma0=0.2, kappa=0.1, radius=0.05)
        assert cfg.thresholds == {"gamma0": 0.2, "kappa": 0.1, "radius": 0.05}


class TestParseCli:
    def test_defaults_filled(self):
        cfg = parse_cli(["circlaw", "--n", "256", "--w", "32", "--profile", "block", "--dist", "rademacher"])
        assert cfg.kind == "circlaw"
        assert (cfg.n, cfg.w) == (256, 32)
        assert cfg.trials == 10
        assert cfg.z == 0.5 + 0.0j

    def test_zero_bandwidth_is_usage_error(self):
        with pytest.raises(SystemExit):
            parse_cli(["locallaw", "--n", "256", "--w", "0"])

    def test_incompatible_distribution_rejected(self):
        with pytest.raises(HypothesisCompatibilityError):
            parse_cli(["leastsing", "--dist", "rademacher", "--profile", "circulant", "--n", "64", "--w", "8"])

    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit):
            parse_cli(["circlaw", "--n", "64", "--w", "8", "--frobnicate", "1"])

    def test_unknown_kind_rejected(self):
        with pytest.raises(SystemExit):
            parse_cli(["eigenfoo", "--n", "64"])

    def test_config_file_with_flag_override(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"n": 64, "w": 8, "dist": "uniform", "z-re": 0.3, "trials": 4}))
        cfg = parse_cli(["singcount", "--config", str(path), "--trials", "7"])
        assert (cfg.n, cfg.w, cfg.dist) == (64, 8, "uniform")
        assert cfg.z == 0.3 + 0.0j
        assert cfg.trials == 7  # flag wins over file

    def test_config_file_unknown_key(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"n": 64, "bogus": 1}))
        with pytest.raises(SystemExit):
            parse_cli(["singcount", "--config", str(path)])


class TestRunContracts:
    def test_circlaw_row_schema_and_range(self):
        cfg = bl.ExperimentConfig(kind="circlaw", n=64, w=8, profile="block", dist="rademacher", trials=1, seed=1)
        rep = bl.run(cfg)
        assert len(rep.rows) == 1
        row = rep.rows[0]
        assert list(rep.columns) == COLUMNS["circlaw"]
        assert 0.0 <= row["radial_ks"] <= 1.0
        assert 0.0 <= row["angular_ks"] <= 1.0
        assert row["status"] == "ok"

    def test_determinism_modulo_timing(self):
        cfg = bl.ExperimentConfig(kind="replacement", n=48, w=8, dist="uniform", trials=3, seed=9)
        a, b = bl.run(cfg), bl.run(cfg)
        assert a.rows == b.rows
        assert a.aggregates == b.aggregates

    def test_row_count_equals_trials(self):
        for kind in ("circlaw", "singcount", "leastsing", "replacement"):
            cfg = bl.ExperimentConfig(kind=kind, n=48, w=8, dist="uniform", trials=4, seed=3, eta_points=4)
            rep = bl.run(cfg)
            assert len(rep.rows) == 4
            assert [r["trial"] for r in rep.rows] == [0, 1, 2, 3]

    def test_locallaw_rows_cover_all_trials_and_etas(self):
        cfg = bl.ExperimentConfig(kind="locallaw", n=48, w=8, trials=3, seed=3, eta_points=5)
        rep = bl.run(cfg)
        assert len(rep.rows) == 15
        assert {r["trial"] for r in rep.rows} == {0, 1, 2}

    def test_failed_trials_kept_as_rows(self, monkeypatch):
        calls = {"n": 0}

        def explode(_matrix):
            calls["n"] += 1
            raise bl.errors.DecompositionError("synthetic failure")

        monkeypatch.setattr("bandlab.experiments.spectra.eigenvalues", explode)
        cfg = bl.ExperimentConfig(kind="circlaw", n=48, w=8, profile="block", dist="gaussian", trials=3, seed=1)
        rep = bl.run(cfg)
        assert len(rep.rows) == 3
        assert all(r["status"].startswith("failed:") for r in rep.rows)
        assert rep.aggregates["ok_fraction"] == 0.0
        assert calls["n"] == 3

    def test_replacement_delta_nonzero_and_shrinking(self):
        medians = {}
        for n, w in ((128, 24), (256, 32)):
            cfg = bl.ExperimentConfig(kind="replacement", n=n, w=w, dist="gaussian", trials=10, seed=1)
            rep = bl.run(cfg)
            assert all(r["delta"] > 0 for r in rep.rows)  # companion uses a derived seed
            medians[n] = rep.aggregates["delta_median"]
        assert medians[256] < medians[128]

    def test_singcount_rows_respect_bound(self):
        cfg = bl.ExperimentConfig(kind="singcount", n=128, w=16, dist="gaussian", trials=5, seed=2)
        rep = bl.run(cfg)
        for row in rep.rows:
            assert row["count"] <= row["bound"]
            assert row["status"] == "ok"
        assert rep.aggregates["stieltjes_pass_fraction"] == 1.0

    def test_leastsing_thresholds_present(self):
        cfg = bl.ExperimentConfig(kind="leastsing", n=64, w=16, dist="uniform", trials=2, seed=2)
        rep = bl.run(cfg)
        assert rep.rows[0]["thresh_2_3"] == ""  # circulant: no block threshold
        cfg = bl.ExperimentConfig(kind="leastsing", n=64, w=16, profile="block", dist="uniform", trials=2, seed=2)
        rep = bl.run(cfg)
        assert rep.rows[0]["thresh_2_3"] != ""

    def test_normcond_delegates_to_scan(self):
        cfg = bl.ExperimentConfig(kind="normcond", n=64, w=8, trials=1, seed=1, radius=0.02, grid_points=3)
        rep = bl.run(cfg)
        assert len(rep.rows) == 81
        assert rep.aggregates["max_norm"] > 1.0
        assert rep.aggregates["max_norm_per_log_sq"] == pytest.approx(
            rep.aggregates["max_norm"] / np.log(64) ** 2
        )

    def test_mc_rows(self):
        cfg = bl.ExperimentConfig(kind="mc", z=0.5, eta_points=6)
        rep = bl.run(cfg)
        assert list(rep.columns) == COLUMNS["mc"]
        assert len(rep.rows) == 6
        assert all(r["residual"] <= 1e-10 for r in rep.rows)

    def test_config_echo(self):
        cfg = bl.ExperimentConfig(kind="mc", eta_points=3)
        rep = bl.run(cfg)
        assert rep.config_echo["kind"] == "mc"
        assert rep.config_echo["z"] == repr(0.5 + 0j)


class TestEmitters:
    def test_csv_round_trip(self, tmp_path):
        cfg = bl.ExperimentConfig(kind="singcount", n=48, w=8, dist="gaussian", trials=3, seed=5)
        rep = bl.run(cfg)
        path = tmp_path / "out.csv"
        bl.emit_csv(rep, path)
        rows = read_csv(path)
        assert rows[0] == list(rep.columns)
        assert len(rows) == 1 + len(rep.rows)
        for parsed, original in zip(rows[1:], rep.rows):
            assert int(parsed[0]) == original["trial"]
            assert int(parsed[1]) == original["count"]
            assert float(parsed[2]) == original["bound"]  # full round-trip precision

    def test_empty_report_gives_header_only(self, tmp_path):
        cfg = bl.ExperimentConfig(kind="circlaw", n=48, w=8, profile="block")
        rep = bl.ExperimentReport(config=cfg, columns=tuple(COLUMNS["circlaw"]), rows=(), aggregates={})
        path = tmp_path / "empty.csv"
        bl.emit_csv(rep, path)
        assert read_csv(path) == [list(COLUMNS["circlaw"])]

    def test_csv_write_error_carries_path(self, tmp_path):
        cfg = bl.ExperimentConfig(kind="mc", eta_points=3)
        rep = bl.run(cfg)
        with pytest.raises(OSError, match="no/such/dir"):
            bl.emit_csv(rep, tmp_path / "no/such/dir/out.csv")

    @pytest.mark.parametrize(
        "kind,kwargs",
        [
            ("circlaw", dict(n=48, w=8, profile="block", dist="gaussian", trials=2)),
            ("locallaw", dict(n=48, w=8, trials=2, eta_points=4)),
            ("singcount", dict(n=48, w=8, trials=2)),
            ("leastsing", dict(n=48, w=8, dist="uniform", trials=2)),
            ("replacement", dict(n=48, w=8, dist="uniform", trials=2)),
            ("normcond", dict(n=32, w=4, grid_points=2)),
            ("mc", dict(eta_points=5)),
        ],
    )
    def test_plot_smoke(self, tmp_path, kind, kwargs):
        cfg = bl.ExperimentConfig(kind=kind, seed=1, **kwargs)
        rep = bl.run(cfg)
        path = tmp_path / f"{kind}.png"
        bl.emit_plot(rep, path)
        data = path.read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"
        assert len(data) > 1000


class TestMain:
    def test_end_to_end(self, tmp_path, capsys):
        out = tmp_path / "run.csv"
        plot = tmp_path / "run.png"
        code = main(
            [
                "circlaw", "--n", "48", "--w", "8", "--profile", "block",
                "--dist", "rademacher", "--trials", "2", "--seed", "3",
                "--out", str(out), "--plot", str(plot),
            ]
        )
        assert code == 0
        assert out.exists() and plot.exists()
        captured = capsys.readouterr().out
        assert "radial_ks_median" in captured

    def test_mc_subcommand_csv(self, tmp_path):
        out = tmp_path / "mc.csv"
        main(["mc", "--z-re", "0.5", "--eta-points", "5", "--out", str(out)])
        rows = read_csv(out)
        assert rows[0] == ["eta", "mc_re", "mc_im", "residual"]
        assert len(rows) == 6

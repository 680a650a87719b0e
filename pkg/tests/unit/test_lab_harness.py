"""
Tests for the lab harness: configuration, power-law fits, R-sweeps,
fixed inequalities, figures and the command line
"""
import pytest
import numpy as np
import pandas as pd
import json
import sys
import os
from fractions import Fraction

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from exponent_ops.polytope import vertex
from harmonic_core.errors import FitError
from harmonic_core.norms import lp_norm_ball
from harmonic_core.profiles import make_profile
from harmonic_core.spacetime import SpaceTimeField, SpaceTimeGrid
from lab_harness.cli import EXIT_ERROR, main
from lab_harness.config import SEED_ENV, LabConfig, load_config
from lab_harness.fitting import fit_power_law
from lab_harness.inequalities import (
    CorpusItem, holder_exponent, holder_lower_bound, holder_upper_bound,
    trivial_exponent, verify_fixed_inequalities
)
from lab_harness.plots import plot_decoupling, plot_packets, plot_sweep
from lab_harness.sweep import (
    CSV_COLUMNS, SweepReport, SweepRow, SweepRunner, default_claim, parse_n_rule,
    predicted_slopes, run_sweep
)
from decoupling.arc_ensemble import fit_growth, run_battery
from wave_packets.decomposition import decompose
from wave_packets.families import make_f1


def synthetic_report():
    rows = []
    for R in (256.0, 1024.0, 4096.0):
        rows.append(SweepRow("bundle", R, int(np.sqrt(R)) - 1, 4.0,
                             lp_norm=R ** -0.25, l2_norm=R ** -0.25, S=R ** -0.5, ratio=1.0))
    report = SweepReport("bundle", 4.0, vertex("U"), "sqrt", rows,
                         predicted=predicted_slopes("bundle", 4.0, "sqrt", vertex("U")))
    for quantity in ("lp_norm", "S", "ratio"):
        report.fits[quantity] = fit_power_law([(r.R, getattr(r, quantity)) for r in rows])
    return report


class TestConfig:
    """Test loading and validating the lab configuration"""

    def test_defaults(self):
        config = LabConfig()
        assert config.threads == 1
        assert config.max_field_points == 2 ** 26
        assert config.slope_tolerance == 0.1
        settings = config.packet_settings(validate=False)
        assert settings.equivalence_bound == 16.0
        assert not settings.validate

    def test_yaml_and_overrides(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("threads: 2\nseed: 5\nshell_points: 64\n")
        config = load_config(path, threads=3, seed=None)
        assert config.threads == 3
        assert config.seed == 5
        assert config.shell_points == 64

    def test_json(self, tmp_path):
        path = tmp_path / "lab.json"
        path.write_text(json.dumps({"partition_restarts": 2, "seed": 1}))
        assert load_config(path).partition_restarts == 2

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "17")
        assert load_config().seed == 17
        assert load_config(seed=3).seed == 3
        monkeypatch.setenv(SEED_ENV, "seventeen")
        with pytest.raises(ValueError):
            load_config()

    def test_rejects_bad_documents(self, tmp_path):
        with pytest.raises(ValueError):
            load_config(tmp_path / "missing.yaml")
        unknown = tmp_path / "unknown.yaml"
        unknown.write_text("seed: 1\nwarp_factor: 9\n")
        with pytest.raises(ValueError):
            load_config(unknown)
        listing = tmp_path / "list.yaml"
        listing.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError):
            load_config(listing)
        with pytest.raises(ValueError):
            load_config(threads=0, seed=1)


class TestPowerLawFit:
    """Test least-squares fits in log-log and linear coordinates"""

    def test_exact_square(self):
        fit = fit_power_law([(x, x ** 2) for x in (1.0, 2.0, 4.0, 8.0)])
        assert fit.slope == pytest.approx(2.0)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.predict(3.0) == pytest.approx(9.0)

    def test_constant(self):
        fit = fit_power_law([(256.0, 1.3), (1024.0, 1.3), (4096.0, 1.3)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)
        assert fit.r_squared == 1.0

    def test_noisy_slope(self):
        rng = np.random.default_rng(0)
        x = np.geomspace(1.0, 1e4, 40)
        y = x ** 2 * (1 + 0.01 * rng.standard_normal(x.size))
        assert fit_power_law(zip(x, y)).slope == pytest.approx(2.0, abs=0.05)

    def test_linear_mode(self):
        fit = fit_power_law([(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)], log_log=False)
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.to_dict()["log_log"] is False

    def test_errors(self):
        with pytest.raises(FitError):
            fit_power_law([(1.0, 1.0), (2.0, 2.0)])
        with pytest.raises(FitError):
            fit_power_law([(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)])
        with pytest.raises(FitError):
            fit_power_law([(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)])
        with pytest.raises(FitError):
            fit_power_law([(1.0, 1.0), (2.0, np.nan), (3.0, 3.0)])


class TestSweepHelpers:
    """Test N rules, predicted slopes and sweep validation"""

    def test_n_rules(self):
        assert parse_n_rule("sqrt")(256.0) == 15
        assert parse_n_rule("const:3")(4096.0) == 3
        assert parse_n_rule("none")(256.0) is None
        for bad in ("const:x", "const:0", "cubic"):
            with pytest.raises(ValueError):
                parse_n_rule(bad)

    def test_predicted_slopes_at_saturating_vertices(self):
        bundle = predicted_slopes("bundle", 4, "sqrt", vertex("U"))
        assert bundle["lp_norm"] == pytest.approx(-0.25)
        assert bundle["ratio"] == pytest.approx(0.0, abs=1e-12)
        star = predicted_slopes("star", 6, "sqrt", vertex("W"))
        assert star["lp_norm"] == pytest.approx(0.0, abs=1e-12)
        assert star["ratio"] == pytest.approx(0.0, abs=1e-12)
        many = predicted_slopes("many", 5, "none", vertex("V"))
        assert many["ratio"] == pytest.approx(0.0, abs=1e-12)
        assert "ratio" not in predicted_slopes("f1", 4)
        with pytest.raises(ValueError):
            predicted_slopes("comb", 4)

    def test_default_claim(self):
        claim = default_claim(4)
        assert claim.alpha == Fraction(1, 8)
        assert claim.beta == 0
        assert default_claim(6).alpha == 0

    def test_sweep_validation(self):
        claim = default_claim(4)
        with pytest.raises(ValueError):
            run_sweep("f1", 4.0, [256.0, 1024.0], "none", claim)
        with pytest.raises(ValueError):
            run_sweep("f1", 4.0, [4096.0, 1024.0, 256.0], "none", claim)
        with pytest.raises(ValueError):
            run_sweep("f1", 4.0, [64.0, 256.0, 1024.0], "none", claim)

    def test_report_frame(self, tmp_path):
        report = synthetic_report()
        frame = report.to_frame()
        assert list(frame.columns) == CSV_COLUMNS
        assert frame["N"].tolist() == [15, 31, 63]
        path = report.write_csv(tmp_path / "sweep.csv")
        again = pd.read_csv(path)
        assert np.allclose(again["lp_norm"], frame["lp_norm"])
        assert report.notes() == []
        assert report.summary()["fits"]["ratio"]["slope"] == pytest.approx(0.0, abs=1e-12)

    def test_notes_are_prefixed_by_scale(self):
        report = synthetic_report()
        report.rows[1].notes.append("band bound violated")
        assert report.notes() == ["R=1024: band bound violated"]
        assert not report.rows[1].ok


class TestSweepRow:
    """Test a single measured sweep row"""

    def test_f1_row_passes_hard_inequalities(self):
        runner = SweepRunner(LabConfig())
        row = runner.row("f1", 256.0, None, 4.0, default_claim(4), seed=0)
        assert row.ok, row.notes
        assert row.lp_norm > 0 and np.isfinite(row.ratio)
        assert row.sup <= row.l1_norm * 1.01
        assert row.band_l2 <= row.band_bound * 1.01
        assert row.oracle_error <= 1e-8 * row.l1_norm

    def test_band_grid_has_unit_spacing(self):
        grid = SweepRunner().band_grid(256.0)
        assert grid.nx == 513
        assert grid.dx == pytest.approx(1.0)

    @pytest.mark.slow
    def test_bundle_saturates_u(self):
        report = run_sweep("bundle", 4.0, [256.0, 1024.0, 4096.0], "sqrt", vertex("U"), seed=1)
        assert report.notes() == []
        assert report.fits["ratio"].slope == pytest.approx(0.0, abs=0.1)
        assert report.fits["lp_norm"].slope == pytest.approx(-0.25, abs=0.1)

    @pytest.mark.slow
    def test_star_saturates_w(self):
        report = run_sweep("star", 6.0, [256.0, 1024.0, 4096.0], "sqrt", vertex("W"), seed=2)
        assert report.notes() == []
        assert report.fits["ratio"].slope == pytest.approx(0.0, abs=0.1)


class TestInequalities:
    """Test Holder interpolation bounds and the fixed inequality checks"""

    def setup_method(self):
        rng = np.random.default_rng(12)
        grid = SpaceTimeGrid(R=8.0, nx=33, nt=33, x_half=8.0, t_half=8.0)
        values = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        self.field = SpaceTimeField(grid, values)

    def test_exponents(self):
        assert trivial_exponent(6) == pytest.approx(0.0)
        assert trivial_exponent(2) == pytest.approx(0.5)
        assert holder_exponent(2, 4, 6) == pytest.approx(0.75)
        with pytest.raises(ValueError):
            holder_exponent(4, 2, 6)

    def test_holder_on_sampled_field(self):
        n2, n4, n6 = (lp_norm_ball(self.field, p, 8.0) for p in (2, 4, 6))
        assert n4 <= holder_upper_bound(n2, n6, 2, 4, 6) * (1 + 1e-9)
        assert n6 >= holder_lower_bound(n2, n4, 2, 4, 6) * (1 - 1e-9)
        assert holder_lower_bound(0.0, n4, 2, 4, 6) == 0.0

    def test_fixed_inequalities(self):
        zero = make_profile(np.zeros(1024), label="zero")
        report = verify_fixed_inequalities([CorpusItem("f1"), zero], [256.0], ps=(6.0,))
        assert len(report.rows) == 1
        assert len(report.skipped) == 1
        assert report.ok
        assert set(report.ratios("f1", 6)) == {256.0}
        assert list(report.to_frame().columns) == [
            "label", "R", "p", "l2_norm", "band_ratio", "trivial_ratio"
        ]

    def test_corpus_labels(self):
        assert CorpusItem("f0").label == "f0"
        assert CorpusItem("bundle").label == "bundle[sqrt]"


class TestPlots:
    """Test that figures are written as SVG"""

    def test_sweep_figure(self, tmp_path):
        path = plot_sweep(synthetic_report(), tmp_path / "sweep.svg")
        assert "<svg" in path.read_text()

    def test_decoupling_figure(self, tmp_path):
        frame = run_battery([1 / 16, 1 / 64], 2, seed=3)
        fit = fit_growth(frame.groupby("delta")["ratio"].max().to_dict())
        path = plot_decoupling(frame, fit, tmp_path / "decouple.svg")
        assert "<svg" in path.read_text()

    def test_packet_figure(self, tmp_path):
        decomp = decompose(make_f1(256.0), 256.0)
        path = plot_packets(decomp, tmp_path / "packets.svg", top=20)
        assert path.exists()


class TestCommandLine:
    """Test the wpl subcommands and their exit codes"""

    def test_polytope_vertex(self, capsys):
        assert main(["polytope", "--vertex", "F"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["classification"] == "open"

    def test_polytope_point(self, tmp_path):
        out = tmp_path / "point.json"
        assert main(["--out", str(out), "polytope", "--p", "4", "--alpha", "1/8", "--beta", "1/4"]) == 0
        assert json.loads(out.read_text())["sufficient"] is True

    def test_polytope_needs_a_point(self):
        assert main(["polytope", "--p", "4"]) == EXIT_ERROR

    def test_example_then_decompose(self, tmp_path, capsys):
        profile = tmp_path / "f1.json"
        assert main(["--out", str(profile), "example", "--family", "f1", "--R", "256"]) == 0
        assert main(["decompose", "--profile", str(profile), "--R", "256"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["packets"]

    def test_example_summary(self, capsys):
        assert main(["example", "--family", "f1", "--R", "256"]) == 0
        assert json.loads(capsys.readouterr().out)["label"] == "f1(R=256)"

    def test_extend_then_norm(self, tmp_path, capsys):
        field = tmp_path / "f1.fld"
        assert main(["--out", str(field), "extend", "--family", "f1", "--R", "64",
                     "--nx", "129", "--nt", "129"]) == 0
        assert main(["norm", str(field), "--p", "2", "4"]) == 0
        lines = [json.loads(line) for line in capsys.readouterr().out.splitlines() if line]
        assert [line["p"] for line in lines] == [2.0, 4.0]
        assert all(line["value"] > 0 for line in lines)

    def test_extend_needs_out(self):
        assert main(["extend", "--family", "f1", "--R", "64"]) == EXIT_ERROR

    def test_partition(self, tmp_path, capsys):
        points = tmp_path / "points.csv"
        pd.DataFrame({"x": [1.0, 1.0, -1.0, -1.0], "t": [1.0, -1.0, 1.0, -1.0],
                      "w": [1.0] * 4}).to_csv(points, index=False)
        assert main(["--seed", "0", "partition", "--points", str(points), "--D", "1"]) == 0
        assert json.loads(capsys.readouterr().out)["imbalance"] == 0.0

    def test_decouple(self, tmp_path):
        out = tmp_path / "battery.csv"
        svg = tmp_path / "battery.svg"
        assert main(["--seed", "1", "--out", str(out), "--svg", str(svg),
                     "decouple", "--delta-list", "1/16", "1/64", "--trials", "2"]) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["delta", "trial", "ratio"]
        assert len(frame) == 4
        assert svg.exists()

    def test_example_with_trailing_out(self, tmp_path):
        profile = tmp_path / "profile.json"
        assert main(["example", "--family", "f0", "--R", "256", "--out", str(profile)]) == 0
        assert json.loads(profile.read_text())["label"] == "f0"

    def test_partition_with_trailing_flags(self, tmp_path):
        points = tmp_path / "points.csv"
        cells = tmp_path / "cells.json"
        pd.DataFrame({"x": [1.0, 1.0, -1.0, -1.0], "t": [1.0, -1.0, 1.0, -1.0],
                      "w": [1.0] * 4}).to_csv(points, index=False)
        assert main(["partition", "--points", str(points), "--D", "1",
                     "--seed", "0", "--out", str(cells)]) == 0
        assert json.loads(cells.read_text())["imbalance"] == 0.0

    def test_decouple_flag_order_does_not_matter(self, tmp_path):
        leading = tmp_path / "leading.csv"
        trailing = tmp_path / "trailing.csv"
        assert main(["--seed", "5", "--out", str(leading),
                     "decouple", "--delta-list", "1/16", "--trials", "2"]) == 0
        assert main(["decouple", "--delta-list", "1/16", "--trials", "2",
                     "--seed", "5", "--out", str(trailing)]) == 0
        assert leading.read_text() == trailing.read_text()

    def test_trailing_flag_overrides_leading(self, tmp_path):
        first = tmp_path / "first.json"
        second = tmp_path / "second.json"
        assert main(["--out", str(first), "polytope", "--vertex", "U", "--out", str(second)]) == 0
        assert second.exists()
        assert not first.exists()

    def test_sweep_rejects_two_scales(self):
        assert main(["sweep", "--family", "f1", "--p", "4", "--R", "256", "1024"]) == EXIT_ERROR

    def test_fit(self, tmp_path, capsys):
        path = tmp_path / "sweep.csv"
        R = np.array([256.0, 1024.0, 4096.0])
        pd.DataFrame({"R": R, "lp_norm": R ** -0.25, "ratio": [1.3] * 3}).to_csv(path, index=False)
        assert main(["fit", str(path)]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["lp_norm"]["slope"] == pytest.approx(-0.25)
        assert document["ratio"]["slope"] == pytest.approx(0.0, abs=1e-12)

    def test_fit_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        pd.DataFrame({"R": [1.0, 2.0, 3.0]}).to_csv(path, index=False)
        assert main(["fit", str(path)]) == EXIT_ERROR

    def test_missing_config(self, tmp_path):
        assert main(["--config", str(tmp_path / "nope.yaml"), "polytope", "--vertex", "U"]) == EXIT_ERROR


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

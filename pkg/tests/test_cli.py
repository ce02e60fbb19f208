"""End-to-end command-line interface tests (in-process)."""
from __future__ import annotations

import json

import numpy as np
import pytest

from mixlab.cli import main
from mixlab.diagnostics import fit_power_law


GOOD_SIMULATE = """
[flow]
variant = "shear"
m = 2

[solver]
n = 32

[params]
horizon = 1.0
record_step = 0.25
"""

BAD_CONFIG = """
scenario = "warp"

[solver]
n = 63
kappa = -1.0
"""


def write(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestValidate:
    def test_ok(self, tmp_path, capsys):
        assert main(["validate", write(tmp_path, GOOD_SIMULATE)]) == 0
        assert capsys.readouterr().out.strip() == "ok"

    def test_violations_listed(self, tmp_path, capsys):
        assert main(["validate", write(tmp_path, BAD_CONFIG)]) == 1
        out = capsys.readouterr().out
        assert "unknown scenario" in out
        assert "n must be even" in out
        assert "kappa" in out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope.toml")]) == 2
        assert "error" in capsys.readouterr().err


class TestSimulate:
    def test_happy_path_writes_outputs(self, tmp_path, capsys):
        out_dir = tmp_path / "run"
        code = main(
            ["simulate", write(tmp_path, GOOD_SIMULATE), "--out", str(out_dir)]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "scenario: simulate" in printed
        assert printed.rstrip().endswith("PASS")
        report = json.loads((out_dir / "report.json").read_text())
        assert report["scenario"] == "simulate"
        assert (out_dir / "trajectory.csv").exists()

    def test_missing_flow_is_config_error(self, tmp_path, capsys):
        path = write(tmp_path, "[solver]\nn = 32\n")
        assert main(["simulate", path]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["simulate", str(tmp_path / "nope.toml")]) == 2
        assert "error" in capsys.readouterr().err


class TestSweep:
    def test_scenario_run_pass(self, tmp_path, capsys):
        toml = """
scenario = "shear_mixing_rate"

[flow]
variant = "shear"
m = 2

[solver]
n = 128

[params]
window = [1.0, 8.0]
record_step = 0.25
"""
        out_dir = tmp_path / "run"
        assert main(["sweep", write(tmp_path, toml), "--out", str(out_dir)]) == 0
        printed = capsys.readouterr().out
        assert "exponent" in printed
        assert printed.rstrip().endswith("PASS")
        report = json.loads((out_dir / "report.json").read_text())
        assert report["passed"] is True

    def test_scenario_mismatch_for_ks_subcommand(self, tmp_path, capsys):
        toml = """
scenario = "shear_mixing_rate"

[flow]
variant = "shear"
"""
        assert main(["ks", write(tmp_path, toml)]) == 2
        assert "keller_segel_suppression" in capsys.readouterr().err

    def test_scenario_mismatch_for_oracle_subcommand(self, tmp_path, capsys):
        toml = """
scenario = "keller_segel_suppression"
"""
        assert main(["oracle-check", write(tmp_path, toml)]) == 2
        assert "oracle_check" in capsys.readouterr().err


class TestDissipationTime:
    def test_zero_flow_report(self, tmp_path, capsys):
        toml = """
[solver]
n = 32
kappa = 1e-2

[params]
step = 2.0
"""
        out_dir = tmp_path / "run"
        code = main(
            ["dissipation-time", write(tmp_path, toml), "--out", str(out_dir)]
        )
        assert code == 0
        lines = (out_dir / "tdis.csv").read_text().splitlines()
        assert lines[0] == "kappa,t_dis,worst_probe,balance_residual"
        assert len(lines) == 2


class TestFit:
    def make_csv(self, tmp_path, kind="power"):
        t = np.linspace(0.25, 16.0, 64)
        if kind == "power":
            v = 3.0 * t**-0.5
        else:
            v = 2.0 * np.exp(-0.8 * t)
        path = tmp_path / "traj.csv"
        lines = ["t,l2,h_minus_1,h1,cum_dissipation"]
        for ti, vi in zip(t, v):
            lines.append(f"{float(ti)!r},1.0,{float(vi)!r},1.0,0.0")
        path.write_text("\n".join(lines) + "\n")
        return str(path), t, v

    def test_power_fit_matches_library(self, tmp_path, capsys):
        path, t, v = self.make_csv(tmp_path)
        assert main(["fit", path, "--t-min", "1.0", "--t-max", "16.0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        direct = fit_power_law(t, v, window=(1.0, 16.0))
        assert payload["kind"] == "power"
        assert payload["exponent_or_rate"] == pytest.approx(direct.exponent, rel=1e-12)
        assert payload["exponent_or_rate"] == pytest.approx(-0.5, abs=1e-9)
        assert payload["r_squared"] == pytest.approx(1.0, abs=1e-12)
        assert payload["t_min"] == 1.0
        assert payload["t_max"] == 16.0

    def test_exponential_fit_with_floor(self, tmp_path, capsys):
        path, _, _ = self.make_csv(tmp_path, kind="exponential")
        code = main(
            ["fit", path, "--kind", "exponential", "--column", "h_minus_1",
             "--floor", "1e-4"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["kind"] == "exponential"
        assert payload["exponent_or_rate"] == pytest.approx(0.8, rel=1e-6)

    def test_unknown_column(self, tmp_path, capsys):
        path, _, _ = self.make_csv(tmp_path)
        assert main(["fit", path, "--column", "entropy"]) == 2
        err = capsys.readouterr().err
        assert "entropy" in err
        assert "h_minus_1" in err

    def test_too_few_points(self, tmp_path, capsys):
        path = tmp_path / "tiny.csv"
        path.write_text("t,l2,h_minus_1,h1,cum_dissipation\n1.0,1.0,1.0,1.0,0.0\n")
        assert main(["fit", str(path)]) == 2
        assert "error" in capsys.readouterr().err

"""End-to-end acceptance suite.

One test, and one printed PASS/FAIL line, per acceptance criterion.  Each
test runs the shipped config from ``configs/`` (the single source of truth
for scenario parameters), asserts the criterion at its stated tolerance,
and enforces the runtime budget.

The energy-balance and conservation tests aggregate observables from the
runs made by the earlier tests, so file order matters: they come last.
"""
from __future__ import annotations

import math
import time
from pathlib import Path

import numpy as np
import pytest

from mixlab.diagnostics import dissipation_time, hminus1_growth_ratio, probe_set
from mixlab.experiments import load_config, run_scenario
from mixlab.field import Grid, mode_field
from mixlab.flows import (
    PierrehumbertFlow,
    ShearFlow,
    ZeroFlow,
    kolmogorov_profile,
    pierrehumbert_schedule,
    schedule_for,
)
from mixlab.solver import SolverConfig, advance_schedule

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

# (label, max balance residual) for every kappa > 0 run in this suite.
BALANCE: list[tuple[str, float]] = []
# (label, l2 drift, min interpolation ratio) for kappa = 0 schedule runs.
CONSERVATION: list[tuple[str, float, float]] = []


def _line(capsys, name: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", flush=True)


def _run(config_name: str, tmp_path: Path):
    config = load_config(CONFIGS / config_name)
    tic = time.perf_counter()
    report = run_scenario(config, tmp_path)
    return report, time.perf_counter() - tic


def test_shear_mixing_rate_m2(tmp_path, capsys):
    report, elapsed = _run("shear_mixing_rate_m2.toml", tmp_path)
    exponent = report.results["exponent"]
    ok = -0.6 <= exponent <= -0.4 and elapsed <= 60.0
    CONSERVATION.append(
        ("shear m=2", report.results["l2_drift"], report.results["min_interpolation_ratio"])
    )
    _line(
        capsys,
        "shear mixing rate (m=2)",
        ok,
        f"exponent={exponent:.4f} in [-0.6, -0.4]; {elapsed:.1f} s (budget 60 s)",
    )
    assert ok and report.passed


def test_shear_mixing_rate_m4(tmp_path, capsys):
    report, elapsed = _run("shear_mixing_rate_m4.toml", tmp_path)
    exponent = report.results["exponent"]
    ok = -0.35 <= exponent <= -0.15 and elapsed <= 60.0
    CONSERVATION.append(
        ("shear m=4", report.results["l2_drift"], report.results["min_interpolation_ratio"])
    )
    _line(
        capsys,
        "shear mixing rate (m=4)",
        ok,
        f"exponent={exponent:.4f} in [-0.35, -0.15]; {elapsed:.1f} s (budget 60 s)",
    )
    assert ok and report.passed


@pytest.fixture(scope="module")
def pierrehumbert_report(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("pierrehumbert_mixing")
    config = load_config(CONFIGS / "pierrehumbert_mixing.toml")
    tic = time.perf_counter()
    report = run_scenario(config, tmp)
    return report, time.perf_counter() - tic


def test_exponential_mixing(pierrehumbert_report, capsys):
    report, elapsed = pierrehumbert_report
    gamma = report.results["gamma"]
    r2 = report.results["r_squared"]
    ok = gamma > 0.05 and r2 >= 0.98 and elapsed <= 120.0
    CONSERVATION.append(
        (
            "pierrehumbert mixing",
            report.results["l2_drift"],
            report.results["min_interpolation_ratio"],
        )
    )
    _line(
        capsys,
        "exponential mixing (pierrehumbert)",
        ok,
        f"gamma={gamma:.4f} > 0.05, r^2={r2:.4f} >= 0.98; {elapsed:.1f} s (budget 120 s)",
    )
    assert ok and report.passed


def test_lipschitz_lower_bound(pierrehumbert_report, capsys):
    report, _ = pierrehumbert_report
    gamma = report.results["gamma"]
    sup_grad = report.results["sup_grad_inf"]
    assert sup_grad == pytest.approx(2.0 * math.pi, rel=1e-12)
    bound = 1.1 * sup_grad
    ok = 0.0 < gamma <= bound
    _line(
        capsys,
        "lipschitz lower bound",
        ok,
        f"gamma={gamma:.4f} <= 1.1 * sup|grad u| = {bound:.4f}",
    )
    assert ok


def test_heat_baseline(capsys):
    grid = Grid(32)
    probes = probe_set(grid)
    tic = time.perf_counter()
    worst_rel = 0.0
    details = []
    for kappa in (1e-2, 1e-3, 1e-4):
        est = dissipation_time(ZeroFlow(), kappa, probes)
        expected = math.log(2.0) / (4.0 * math.pi**2 * kappa)
        rel = abs(est.t_dis - expected) / expected
        worst_rel = max(worst_rel, rel)
        details.append(f"kappa={kappa:g}: t_dis={est.t_dis:.4f} vs {expected:.4f}")
    elapsed = time.perf_counter() - tic
    ok = worst_rel <= 0.01 and elapsed <= 30.0
    _line(
        capsys,
        "heat baseline",
        ok,
        f"max rel err={worst_rel:.2e} <= 1e-2 ({'; '.join(details)}); {elapsed:.1f} s",
    )
    assert ok


def test_shear_tdis_scaling(tmp_path, capsys):
    report, elapsed = _run("shear_tdis_scaling.toml", tmp_path)
    slope = report.results["slope"]
    BALANCE.append(("shear t_dis sweep", report.results["max_balance_residual"]))
    ok = -0.6 <= slope <= -0.4 and elapsed <= 600.0
    _line(
        capsys,
        "enhanced dissipation scaling (shear)",
        ok,
        f"slope={slope:.4f} in [-0.6, -0.4]; {elapsed:.1f} s (budget 600 s)",
    )
    assert ok and report.passed


def test_cellular_tdis_scaling(tmp_path, capsys):
    report, elapsed = _run("cellular_tdis_scaling.toml", tmp_path)
    slope = report.results["slope"]
    BALANCE.append(("cellular t_dis sweep", report.results["max_balance_residual"]))
    ok = -0.7 <= slope <= -0.3 and elapsed <= 900.0
    _line(
        capsys,
        "cellular scaling",
        ok,
        f"slope={slope:.4f} in [-0.7, -0.3]; {elapsed:.1f} s (budget 900 s)",
    )
    assert ok and report.passed


def test_pierrehumbert_tdis_scaling(tmp_path, capsys):
    report, elapsed = _run("pierrehumbert_tdis_scaling.toml", tmp_path)
    ratios = report.results["ratios_by_decreasing_kappa"]
    BALANCE.append(("pierrehumbert t_dis sweep", report.results["max_balance_residual"]))
    ok = report.results["non_increasing"] and elapsed <= 600.0
    _line(
        capsys,
        "mixing-flow dissipation time (pierrehumbert)",
        ok,
        f"t_dis/ln(kappa)^2 non-increasing: {[f'{r:.4f}' for r in ratios]}; "
        f"{elapsed:.1f} s (budget 600 s)",
    )
    assert ok and report.passed


def test_anomalous_dissipation(tmp_path, capsys):
    report, elapsed = _run("anomalous_dissipation.toml", tmp_path)
    cascade = report.results["cascade_points"]
    ref = report.results["reference_fraction"]
    contrast = report.results["contrast_ratio"]
    BALANCE.append(("anomalous sweep", report.results["max_balance_residual"]))
    fractions_ok = all(
        r["fraction"] >= 0.5 * ref and r["fraction"] >= 0.05 for r in cascade
    )
    ok = fractions_ok and contrast >= 5.0 and elapsed <= 1800.0
    fraction_txt = ", ".join(f"{r['fraction']:.3f}" for r in cascade)
    _line(
        capsys,
        "anomalous dissipation (cascade)",
        ok,
        f"fractions=[{fraction_txt}] (ref {ref:.3f}), "
        f"contrast={contrast:.1f}x >= 5x; {elapsed:.1f} s (budget 1800 s)",
    )
    assert ok and report.passed


def test_oracle_equivalence(tmp_path, capsys):
    report, elapsed = _run("oracle_check.toml", tmp_path)
    n_agree = report.results["n_agree"]
    BALANCE.append(("oracle spectral run", report.results["balance_residual"]))
    ok = n_agree >= 13 and elapsed <= 300.0
    _line(
        capsys,
        "oracle equivalence (feynman-kac)",
        ok,
        f"{n_agree}/16 points within 3*stderr + 1e-3; {elapsed:.1f} s (budget 300 s)",
    )
    assert ok and report.passed


def test_keller_segel_suppression(tmp_path, capsys):
    report, elapsed = _run("keller_segel_suppression.toml", tmp_path)
    runs = report.results["runs"]
    times = [(r["blowup_time"] if r["blowup"] else math.inf) for r in runs]
    ok = (
        report.results["unadvected_blows_before_deadline"]
        and report.results["top_amplitude_survives"]
        and report.results["blowup_times_nondecreasing"]
        and elapsed <= 600.0
    )
    _line(
        capsys,
        "keller-segel suppression",
        ok,
        f"blow-up times {times} nondecreasing, top amplitude survives; "
        f"{elapsed:.1f} s (budget 600 s)",
    )
    assert ok and report.passed


def test_conservation_suite(capsys):
    grid = Grid(256)
    rho0 = mode_field(grid, 1, 0)
    cfg = SolverConfig(snapshot_stride=4)

    shear = schedule_for(ShearFlow(kolmogorov_profile(2)), horizon=8.0, step_hint=0.25)
    traj_shear = advance_schedule(rho0, shear, 0.0, cfg)
    pier = pierrehumbert_schedule(PierrehumbertFlow(amplitude=1.0, tau=1.0, seed=0), 8)
    traj_pier = advance_schedule(mode_field(Grid(128), 1, 0), pier, 0.0, cfg)

    drifts = [
        ("direct shear", float(np.max(np.abs(traj_shear.l2 - traj_shear.l2[0]))), 0.0),
        ("direct pierrehumbert", float(np.max(np.abs(traj_pier.l2 - traj_pier.l2[0]))), 0.0),
    ]
    drift_ok = all(d <= 1e-10 for _, d, _ in drifts) and all(
        drift <= 1e-10 for _, drift, _ in CONSERVATION
    )

    mean_ok = True
    for traj in (traj_shear, traj_pier):
        mean_ok &= traj.final_field.spectrum[0, 0] == 0.0
        mean_ok &= all(f.spectrum[0, 0] == 0.0 for _, _, f in traj.snapshots)

    ratio_min = min(
        float(hminus1_growth_ratio(traj_shear).min()),
        float(hminus1_growth_ratio(traj_pier).min()),
        min((r for _, _, r in CONSERVATION), default=1.0),
    )
    ratio_ok = ratio_min >= 1.0 - 1e-9

    ok = drift_ok and mean_ok and ratio_ok
    worst_drift = max(
        max(d for _, d, _ in drifts), max((d for _, d, _ in CONSERVATION), default=0.0)
    )
    _line(
        capsys,
        "conservation suite",
        ok,
        f"max l2 drift={worst_drift:.2e} <= 1e-10, mean-zero exact, "
        f"min interpolation ratio={ratio_min:.12f} >= 1 - 1e-9 "
        f"({len(CONSERVATION) + 2} trajectories)",
    )
    assert ok


def test_energy_balance(capsys):
    assert BALANCE, "no kappa > 0 acceptance runs registered"
    worst = max(res for _, res in BALANCE)
    ok = worst <= 1e-4
    _line(
        capsys,
        "energy balance",
        ok,
        f"max residual={worst:.2e} <= 1e-4 over {len(BALANCE)} kappa > 0 run groups",
    )
    assert ok

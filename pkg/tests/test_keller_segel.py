"""Tests for the advected Keller-Segel module."""

from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from mixlab.field import Grid, ScalarField, l2_norm, mode_field
from mixlab.flows import PierrehumbertFlow, ShearFlow, ZeroFlow, kolmogorov_profile
from mixlab.keller_segel import (
    KS_HEADER,
    KsConfig,
    KsState,
    bump_density,
    chemoattractant_solve,
    ks_advance,
)


class TestChemoattractant:
    def test_single_mode_inverse_laplacian(self):
        # -Lap c = theta gives c = theta / (4 pi^2 |k|^2) per mode
        grid = Grid(32)
        theta = mode_field(grid, 1, 0)
        c = chemoattractant_solve(theta)
        assert np.allclose(c.values, theta.values / (4.0 * math.pi**2), atol=1e-14)

    def test_roundtrip_residual(self):
        from mixlab.field import random_band_limited

        grid = Grid(64)
        theta = random_band_limited(grid, seed=6, band=10)
        c = chemoattractant_solve(theta)
        lap = ScalarField.from_spectrum(
            grid, -4.0 * math.pi**2 * grid.k_sq * c.spectrum
        )
        residual = l2_norm(
            ScalarField.from_spectrum(grid, lap.spectrum + theta.spectrum)
        )
        assert residual <= 1e-12 * l2_norm(theta)


class TestBumpDensity:
    def test_mean_and_peak(self):
        grid = Grid(64)
        state = bump_density(grid, mass=20.0, sigma=0.2, center=(0.5, 0.5))
        assert state.n_bar == 20.0
        # theta is the mean-zero deviation
        assert abs(state.theta.values.mean()) < 1e-10
        peak = np.unravel_index(np.argmax(state.theta.values), (64, 64))
        assert peak == (32, 32)

    def test_positive_density_when_broad(self):
        grid = Grid(64)
        state = bump_density(grid, mass=10.0, sigma=0.2)
        density = state.n_bar + state.theta.values
        assert density.min() > 0.0

    def test_validation(self):
        grid = Grid(16)
        with pytest.raises(ValueError):
            bump_density(grid, mass=0.0, sigma=0.1)
        with pytest.raises(ValueError):
            bump_density(grid, mass=1.0, sigma=-0.1)
        with pytest.raises(ValueError):
            KsState(theta=mode_field(grid, 1, 0), n_bar=0.0)
        with pytest.raises(ValueError):
            KsConfig(dt=0.0)
        with pytest.raises(ValueError):
            KsConfig(record_every=0)


class TestDynamics:
    def test_linearized_decay_rate(self):
        # tiny deviation: d theta_hat/dt = (chi*n_bar - 4 pi^2 |k|^2) theta_hat
        grid = Grid(32)
        n_bar, chi = 10.0, 1.0
        theta = ScalarField.from_spectrum(grid, 1e-8 * mode_field(grid, 1, 0).spectrum)
        state = KsState(theta=theta, n_bar=n_bar)
        traj = ks_advance(state, ZeroFlow(), 0.1, KsConfig(chi=chi, dt=5e-4,
                                                           record_every=10))
        rate = math.log(traj.l2_theta[1] / traj.l2_theta[-1]) / (
            traj.times[-1] - traj.times[1]
        )
        assert rate == pytest.approx(4.0 * math.pi**2 - chi * n_bar, rel=1e-3)

    def test_mass_conservation(self):
        grid = Grid(64)
        state = bump_density(grid, mass=10.0, sigma=0.15)
        traj = ks_advance(state, ZeroFlow(), 0.1, KsConfig(dt=5e-4, record_every=10))
        assert abs(traj.final_state.theta.values.mean()) < 1e-12

    def test_subcritical_datum_decays(self):
        grid = Grid(64)
        state = bump_density(grid, mass=10.0, sigma=0.15)
        traj = ks_advance(state, ZeroFlow(), 0.1, KsConfig(dt=5e-4, record_every=10))
        assert not traj.blowup_flag
        assert traj.l2_theta[-1] < 0.1 * traj.l2_theta[0]
        assert np.all(traj.min_density > 0.0)

    def test_chemoattractant_residual_after_run(self):
        grid = Grid(64)
        state = bump_density(grid, mass=10.0, sigma=0.15)
        traj = ks_advance(state, ZeroFlow(), 0.05, KsConfig(dt=5e-4))
        theta = traj.final_state.theta
        c = chemoattractant_solve(theta)
        lap = -4.0 * math.pi**2 * grid.k_sq * c.spectrum
        residual = l2_norm(ScalarField.from_spectrum(grid, lap + theta.spectrum))
        assert residual <= 1e-10 * l2_norm(theta)

    def test_supercritical_datum_blows_up(self):
        grid = Grid(64)
        state = bump_density(grid, mass=40.0, sigma=0.2)
        traj = ks_advance(state, ZeroFlow(), 0.2, KsConfig(dt=2.5e-4, record_every=5))
        assert traj.blowup_flag
        assert traj.blowup_time is not None and traj.blowup_time < 0.1

    def test_mixing_delays_blowup(self):
        grid = Grid(64)
        state = bump_density(grid, mass=35.0, sigma=0.2)
        flow = PierrehumbertFlow(amplitude=1.0, tau=0.05, seed=0)
        cfg = KsConfig(dt=2.5e-4, record_every=8)
        still = ks_advance(state, flow, 0.5, cfg, amplitude_scale=0.0)
        stirred = ks_advance(state, flow, 0.5, cfg, amplitude_scale=5.0)
        assert still.blowup_flag and stirred.blowup_flag
        assert stirred.blowup_time > still.blowup_time

    def test_strong_mixing_suppresses_blowup(self):
        grid = Grid(64)
        state = bump_density(grid, mass=35.0, sigma=0.2)
        flow = PierrehumbertFlow(amplitude=1.0, tau=0.05, seed=0)
        traj = ks_advance(state, flow, 0.5, KsConfig(dt=2.5e-4, record_every=8),
                          amplitude_scale=15.0)
        assert not traj.blowup_flag
        assert traj.l2_theta[-1] < traj.l2_theta[0]


class TestInterface:
    def test_amplitude_scale_only_for_pierrehumbert(self):
        grid = Grid(32)
        state = bump_density(grid, mass=5.0, sigma=0.2)
        flow = ShearFlow(kolmogorov_profile(2, 1.0))
        with pytest.raises(ValueError):
            ks_advance(state, flow, 0.01, KsConfig(dt=1e-3), amplitude_scale=2.0)

    def test_zero_scale_equals_zero_flow(self):
        grid = Grid(32)
        state = bump_density(grid, mass=5.0, sigma=0.2)
        flow = PierrehumbertFlow(amplitude=3.0, tau=0.05, seed=1)
        cfg = KsConfig(dt=1e-3, record_every=5)
        a = ks_advance(state, flow, 0.05, cfg, amplitude_scale=0.0)
        b = ks_advance(state, ZeroFlow(), 0.05, cfg)
        assert np.array_equal(a.l2_theta, b.l2_theta)

    def test_csv_format(self, tmp_path):
        grid = Grid(64)
        state = bump_density(grid, mass=40.0, sigma=0.2)
        traj = ks_advance(state, ZeroFlow(), 0.2, KsConfig(dt=2.5e-4, record_every=5))
        path = tmp_path / "ks.csv"
        traj.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == KS_HEADER == "t,l2_theta,max_density,tail_fraction,blowup"
        rows = list(csv.DictReader(lines))
        flags = np.array([int(r["blowup"]) for r in rows])
        times = np.array([float(r["t"]) for r in rows])
        # flag turns on exactly at the blow-up time and stays on
        assert np.array_equal(flags == 1, times >= traj.blowup_time - 1e-12)

    def test_t_end_must_advance(self):
        grid = Grid(16)
        state = bump_density(grid, mass=5.0, sigma=0.2)
        with pytest.raises(ValueError):
            ks_advance(state, ZeroFlow(), 0.0, KsConfig(dt=1e-3))

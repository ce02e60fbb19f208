"""Tests for the Monte Carlo Feynman-Kac oracle."""

from __future__ import annotations

import math

import numpy as np
import pytest

from mixlab.field import Grid, mode_field, random_band_limited
from mixlab.flows import (
    AXIS_X1,
    CellularFlow,
    PierrehumbertFlow,
    ShearFlow,
    ZeroFlow,
    kolmogorov_profile,
    schedule_for,
)
from mixlab.lagrangian import McConfig, McResult, feynman_kac_estimate


class TestDeterministicTransport:
    def test_single_shear_pullback_is_exact(self):
        # kappa=0 collapses to the inverse characteristic map
        grid = Grid(64)
        rho0 = random_band_limited(grid, seed=3, band=4)
        prof = kolmogorov_profile(2, 0.7)
        flow = ShearFlow(prof, axis=AXIS_X1)
        t = 0.6
        pts = np.array([[0.12, 0.37], [0.5, 0.5], [0.83, 0.09], [0.25, 0.99]])
        res = feynman_kac_estimate(rho0, flow, 0.0, t, pts)
        expect = rho0.evaluate_at(pts[:, 0] - t * prof.value(pts[:, 1]), pts[:, 1])
        assert res.n_paths == 1
        assert np.allclose(res.estimates, expect, atol=1e-10)
        assert np.all(res.stderrs == 0.0)

    def test_alternating_steps_compose_in_reverse(self):
        # hand-applied inverse maps in reverse step order
        grid = Grid(64)
        rho0 = random_band_limited(grid, seed=8, band=4)
        flow = PierrehumbertFlow(amplitude=0.9, tau=0.5, seed=21)
        t = 2.0
        pts = np.array([[0.2, 0.6], [0.7, 0.15], [0.45, 0.8]])
        res = feynman_kac_estimate(rho0, flow, 0.0, t, pts)
        x1, x2 = pts[:, 0].copy(), pts[:, 1].copy()
        for step in reversed(schedule_for(flow, horizon=t).steps):
            if step.axis == AXIS_X1:
                x1 = (x1 - step.duration * step.speed_at(x2)) % 1.0
            else:
                x2 = (x2 - step.duration * step.speed_at(x1)) % 1.0
        assert np.allclose(res.estimates, rho0.evaluate_at(x1, x2), atol=1e-10)


class TestStochasticEstimates:
    def test_pure_diffusion_matches_heat_kernel(self):
        grid = Grid(32)
        rho0 = mode_field(grid, 1, 0)
        kappa, t = 0.05, 0.5
        pts = np.array([[0.3, 0.7], [0.1, 0.2]])
        res = feynman_kac_estimate(
            rho0, ZeroFlow(), kappa, t, pts, McConfig(n_paths=20_000, seed=5)
        )
        decay = math.exp(-4.0 * math.pi**2 * kappa * t)
        expect = decay * rho0.evaluate_at(pts[:, 0], pts[:, 1])
        assert np.all(np.abs(res.estimates - expect) < 4.0 * res.stderrs)
        assert np.all(res.stderrs < 0.01)

    def test_sheared_diffusion_matches_spectral_solver(self):
        from mixlab.solver import SolverConfig, advance_schedule

        grid = Grid(64)
        rho0 = random_band_limited(grid, seed=2, band=3)
        flow = ShearFlow(kolmogorov_profile(2, 1.0))
        kappa, t = 1e-2, 1.0
        pde = advance_schedule(
            rho0, schedule_for(flow, horizon=t, step_hint=0.25), kappa,
            SolverConfig(dt=0.25),
        ).final_field
        idx = np.array([[5, 9], [20, 41], [48, 17], [33, 60]])
        pts = idx[:, ::-1] / 64.0  # rows are (i2, i1); points are (x1, x2)
        res = feynman_kac_estimate(
            rho0, flow, kappa, t, pts, McConfig(n_paths=8_000, seed=11)
        )
        expect = pde.values[idx[:, 0], idx[:, 1]]
        assert np.all(np.abs(res.estimates - expect) < 4.0 * res.stderrs + 5e-3)

    def test_stderr_scales_with_path_count(self):
        grid = Grid(32)
        rho0 = mode_field(grid, 1, 1)
        pts = np.array([[0.25, 0.25]])
        errs = []
        for n in (1_000, 4_000):
            res = feynman_kac_estimate(
                rho0, ZeroFlow(), 0.02, 0.4, pts, McConfig(n_paths=n, seed=3)
            )
            errs.append(res.stderrs[0])
        assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.35)

    def test_seed_determinism(self):
        grid = Grid(32)
        rho0 = mode_field(grid, 1, 0)
        pts = np.array([[0.4, 0.6]])
        a = feynman_kac_estimate(rho0, ZeroFlow(), 0.01, 0.3, pts,
                                 McConfig(n_paths=500, seed=7))
        b = feynman_kac_estimate(rho0, ZeroFlow(), 0.01, 0.3, pts,
                                 McConfig(n_paths=500, seed=7))
        c = feynman_kac_estimate(rho0, ZeroFlow(), 0.01, 0.3, pts,
                                 McConfig(n_paths=500, seed=8))
        assert a.estimates[0] == b.estimates[0]
        assert a.estimates[0] != c.estimates[0]

    def test_points_are_independent_streams(self):
        # estimate at a point must not depend on which batch it sits in
        grid = Grid(32)
        rho0 = mode_field(grid, 1, 0)
        cfg = McConfig(n_paths=200, seed=9)
        solo = feynman_kac_estimate(rho0, ZeroFlow(), 0.01, 0.3,
                                    np.array([[0.4, 0.6]]), cfg)
        # same point in the lead position of a longer list: same stream
        batch = feynman_kac_estimate(rho0, ZeroFlow(), 0.01, 0.3,
                                     np.array([[0.4, 0.6], [0.1, 0.1]]), cfg)
        assert solo.estimates[0] == batch.estimates[0]


class TestValidation:
    def test_rejects_bad_inputs(self):
        grid = Grid(16)
        rho0 = mode_field(grid, 1, 0)
        with pytest.raises(ValueError):
            feynman_kac_estimate(rho0, ZeroFlow(), 0.0, 0.0, np.array([[0.1, 0.1]]))
        with pytest.raises(ValueError):
            feynman_kac_estimate(rho0, ZeroFlow(), 0.0, 0.5, np.zeros((2, 3)))
        with pytest.raises(ValueError):
            McConfig(n_paths=0)
        with pytest.raises(ValueError):
            McConfig(sde_dt=-0.1)

    def test_cellular_flow_unsupported(self):
        # only piecewise-shear flows have exactly integrable drift
        grid = Grid(16)
        rho0 = mode_field(grid, 1, 0)
        with pytest.raises(TypeError):
            feynman_kac_estimate(
                rho0, CellularFlow(A=1.0, eps=0.25), 0.0, 0.5,
                np.array([[0.1, 0.1]]),
            )

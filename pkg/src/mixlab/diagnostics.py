"""Decay-rate fits, dissipation times, and energy bookkeeping checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .field import Grid, ScalarField, gaussian_packet, mode_field, random_band_limited
from .flows import CellularFlow, Flow, schedule_for
from .solver import (
    Trajectory,
    _DiagonalAdvection,
    cellular_split_dt,
    diffusion_multiplier,
    exact_shear_step,
)

__all__ = [
    "FitResult",
    "fit_power_law",
    "fit_exponential",
    "DissipationConfig",
    "DissipationTimeEstimate",
    "probe_set",
    "packet_probe_set",
    "dissipation_time",
    "energy_balance_residual",
    "dissipated_fraction",
    "hminus1_growth_ratio",
]


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of a decaying series.

    For ``kind == 'power'`` the model is C * t**exponent; for
    ``kind == 'exponential'`` it is C * exp(-rate * t) and ``rate``
    is positive for decay. ``r_squared`` is the coefficient of
    determination in the fitted (log) coordinates.
    """

    kind: str
    exponent: float
    rate: float
    intercept: float
    r_squared: float
    t_min: float
    t_max: float
    n_points: int


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_sq = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_sq


def fit_power_law(
    times, values, window: tuple[float, float] | None = None
) -> FitResult:
    """Fit values ~ C * t**p on log-log axes.

    Without an explicit window the initial transient t < 1 is dropped;
    non-positive entries are always excluded.
    """
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    lo, hi = window if window is not None else (1.0, math.inf)
    mask = (t >= lo) & (t <= hi) & (t > 0) & (v > 0)
    if mask.sum() < 3:
        raise ValueError("need at least 3 usable points for a power-law fit")
    slope, intercept, r_sq = _linfit(np.log(t[mask]), np.log(v[mask]))
    return FitResult(
        kind="power",
        exponent=slope,
        rate=-slope,
        intercept=math.exp(intercept),
        r_squared=r_sq,
        t_min=float(t[mask].min()),
        t_max=float(t[mask].max()),
        n_points=int(mask.sum()),
    )


def fit_exponential(
    times,
    values,
    window: tuple[float, float] | None = None,
    drop_first: bool = True,
    floor: float | None = None,
) -> FitResult:
    """Fit values ~ C * exp(-rate * t) on semilog axes.

    Without an explicit window the first sample (initial transient) is
    dropped. If ``floor`` is given, the series is truncated at the first
    time the value falls below it; this bounds fits away from any
    discrete resolution plateau.
    """
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    mask = v > 0
    if window is not None:
        mask &= (t >= window[0]) & (t <= window[1])
    elif drop_first and len(t) > 0:
        mask &= t > t[0]
    if floor is not None:
        below = np.nonzero(v < floor)[0]
        if below.size:
            mask &= np.arange(len(t)) < below[0]
    if mask.sum() < 3:
        raise ValueError("need at least 3 usable points for an exponential fit")
    slope, intercept, r_sq = _linfit(t[mask], np.log(v[mask]))
    return FitResult(
        kind="exponential",
        exponent=slope,
        rate=-slope,
        intercept=math.exp(intercept),
        r_squared=r_sq,
        t_min=float(t[mask].min()),
        t_max=float(t[mask].max()),
        n_points=int(mask.sum()),
    )


@dataclass(frozen=True)
class DissipationConfig:
    """Controls for dissipation-time measurement.

    ``step`` chops steady shear flows into schedule steps; ``dt``
    overrides the cellular splitting step (default: the safety-factor
    step of :func:`mixlab.solver.cellular_split_dt`); the run is
    abandoned if a probe has not halved by ``max_horizon``. Crossings
    are refined to relative tolerance ``refine_rel_tol`` by re-running
    the bracketing step at finer resolution.
    """

    step: float = 0.25
    dt: float | None = None
    max_horizon: float = 1e4
    refine_rel_tol: float = 1e-3
    check_every: int = 4
    split_safety: float = 0.1


@dataclass(frozen=True)
class DissipationTimeEstimate:
    """Measured halving times; ``t_dis`` is the worst probe's time.

    ``balance_residual`` is the largest relative energy-balance defect
    observed over all probes while they were being advanced.
    """

    t_dis: float
    kappa: float
    per_probe: tuple[tuple[str, float], ...]
    worst_probe: str
    balance_residual: float = 0.0


def probe_set(
    grid: Grid, seed: int = 0, n_random: int = 3, band: int = 8
) -> list[tuple[str, ScalarField]]:
    """Default probes: the 4 lowest distinct-|k| modes plus seeded random fields.

    Labels are comma-free (semicolon between wavenumbers) so they can sit
    in unquoted CSV columns.
    """
    probes: list[tuple[str, ScalarField]] = [
        ("mode(1;0)", mode_field(grid, 1, 0)),
        ("mode(1;1)", mode_field(grid, 1, 1)),
        ("mode(2;0)", mode_field(grid, 2, 0)),
        ("mode(2;1)", mode_field(grid, 2, 1)),
    ]
    for i in range(n_random):
        probes.append(
            (f"random-{i}", random_band_limited(grid, seed=seed + i, band=band))
        )
    return probes


def packet_probe_set(
    grid: Grid,
    sigmas: tuple[float, ...] = (0.0125, 0.02, 0.032, 0.05, 0.08, 0.128),
    center: float = 0.25,
    k1: int = 1,
) -> list[tuple[str, ScalarField]]:
    """Wave packets concentrated near a shear profile's critical point.

    For shear flows the slowest-decaying data are packets around the
    profile's critical points with width of order kappa**(1/4); a fixed
    geometric ladder of widths lets the worst probe track that optimum
    across a diffusivity sweep.
    """
    return [
        (f"packet({sigma:g})", gaussian_packet(grid, k1, center, sigma))
        for sigma in sigmas
    ]


def _energies(specs: np.ndarray) -> np.ndarray:
    return (specs.real**2 + specs.imag**2).sum(axis=(-2, -1))


def _strang_step(specs, grid, step, kappa, duration=None):
    tau = step.duration if duration is None else duration
    if kappa > 0.0:
        half = diffusion_multiplier(grid, kappa, tau / 2.0)
        specs = specs * half
        specs = exact_shear_step(specs, grid, step, duration=tau)
        return specs * half
    return exact_shear_step(specs, grid, step, duration=tau)


def _refine_schedule_crossing(
    pre_spec, grid, step, kappa, target, t_start, tol
) -> float:
    lo, hi = 0.0, step.duration
    while hi - lo > tol * max(t_start + hi, step.duration):
        mid = 0.5 * (lo + hi)
        e = float(_energies(_strang_step(pre_spec, grid, step, kappa, duration=mid))[0])
        if e <= target:
            hi = mid
        else:
            lo = mid
    return t_start + 0.5 * (lo + hi)


def _halving_times_schedule(flow, kappa, probes, grid, cfg):
    labels = [label for label, _ in probes]
    specs = np.stack([p.spectrum for _, p in probes])
    e_init = _energies(specs)  # indexed by original probe position
    target = e_init / 4.0
    cums = np.zeros(len(labels))
    max_defect = 0.0
    horizon = cfg.max_horizon
    schedule = schedule_for(flow, horizon=min(horizon, 64.0), step_hint=cfg.step)
    steps = list(schedule.steps)
    results: dict[str, float] = {}
    active = list(range(len(labels)))
    t = 0.0
    idx = 0
    while active:
        if idx >= len(steps):
            if t >= horizon:
                break
            # Extend the schedule; phase draws are prefix-stable per flow seed.
            schedule = schedule_for(
                flow, horizon=min(horizon, max(2.0 * t, 64.0)), step_hint=cfg.step
            )
            if len(schedule.steps) <= len(steps):
                break
            steps = list(schedule.steps)
            continue
        step = steps[idx]
        pre = specs.copy()
        if kappa > 0.0:
            half = diffusion_multiplier(grid, kappa, step.duration / 2.0)
            e0 = _energies(specs)
            specs = specs * half
            e1 = _energies(specs)
            specs = exact_shear_step(specs, grid, step)
            e2 = _energies(specs)
            specs = specs * half
            energies = _energies(specs)
            cums[active] += ((e0 - e1) + (e2 - energies)) / (2.0 * kappa)
            defect = np.abs(energies - e_init[active] + 2.0 * kappa * cums[active])
            max_defect = max(max_defect, float(np.max(defect / e_init[active])))
        else:
            specs = exact_shear_step(specs, grid, step)
            energies = _energies(specs)
        if np.any(energies <= target[active]):
            keep = []
            for pos, j in enumerate(active):
                if energies[pos] <= target[j]:
                    results[labels[j]] = _refine_schedule_crossing(
                        pre[pos][None], grid, step, kappa,
                        float(target[j]), t, cfg.refine_rel_tol,
                    )
                else:
                    keep.append(pos)
            specs = specs[keep]
            active = [active[pos] for pos in keep]
        t += step.duration
        idx += 1
    if active:
        raise RuntimeError(
            f"probes {[labels[j] for j in active]} did not halve "
            f"within horizon {horizon:g}"
        )
    return results, max_defect


def _halving_times_cellular(flow, kappa, probes, grid, cfg):
    labels = [label for label, _ in probes]
    dt = cfg.dt if cfg.dt is not None else cellular_split_dt(flow, cfg.split_safety)
    adv = _DiagonalAdvection(grid, flow, dt)
    half = diffusion_multiplier(grid, kappa, dt / 2.0)
    n2 = grid.n**2
    specs = np.stack([p.spectrum for _, p in probes])
    e_init = _energies(specs)
    target = e_init / 4.0
    cums = np.zeros(len(labels))
    max_defect = 0.0
    results: dict[str, float] = {}
    active = list(range(len(labels)))
    checkpoint = specs.copy()
    i = 0
    max_steps = int(math.ceil(cfg.max_horizon / dt))
    while active and i < max_steps:
        for _ in range(cfg.check_every):
            e0 = _energies(specs)
            specs = specs * half
            e1 = _energies(specs)
            vals = _fft.ifft2(specs * n2, axes=(-2, -1)).real
            vals = adv.apply(vals)
            specs = _fft.fft2(vals, axes=(-2, -1)) / n2
            e2 = _energies(specs)
            specs = specs * half
            e3 = _energies(specs)
            cums[active] += ((e0 - e1) + (e2 - e3)) / (2.0 * kappa)
            i += 1
        t = i * dt
        energies = _energies(specs)
        if not np.all(np.isfinite(energies)):
            raise RuntimeError("non-finite energies in dissipation-time run")
        defect = np.abs(energies - e_init[active] + 2.0 * kappa * cums[active])
        max_defect = max(max_defect, float(np.max(defect / e_init[active])))
        crossed = [pos for pos, j in enumerate(active) if energies[pos] <= target[j]]
        if crossed:
            for pos in crossed:
                j = active[pos]
                results[labels[j]] = _refine_cellular_crossing(
                    checkpoint[pos], adv, half, n2, dt,
                    t - cfg.check_every * dt, cfg.check_every, float(target[j]),
                )
            keep = [pos for pos in range(len(active)) if pos not in crossed]
            specs = specs[keep]
            active = [active[pos] for pos in keep]
        checkpoint = specs.copy()
    if active:
        raise RuntimeError(
            f"probes {[labels[j] for j in active]} did not halve "
            f"within horizon {cfg.max_horizon:g}"
        )
    return results, max_defect


def _refine_cellular_crossing(
    spec0, adv, half, n2, dt, t0, n_steps, target
) -> float:
    """Replay a bracket one step at a time; interpolate inside the last step."""
    spec = spec0[None]
    e_prev = float(_energies(spec)[0])
    for s in range(1, n_steps + 1):
        spec = spec * half
        vals = _fft.ifft2(spec * n2, axes=(-2, -1)).real
        vals = adv.apply(vals)
        spec = _fft.fft2(vals, axes=(-2, -1)) / n2
        spec = spec * half
        e_now = float(_energies(spec)[0])
        if e_now <= target:
            # log-linear interpolation of the energy inside one dt step
            if e_prev <= target or e_now <= 0.0:
                frac = 0.0
            else:
                frac = math.log(e_prev / target) / math.log(e_prev / e_now)
            return t0 + (s - 1 + frac) * dt
        e_prev = e_now
    return t0 + n_steps * dt


def dissipation_time(
    flow: Flow,
    kappa: float,
    probes: list[tuple[str, ScalarField]],
    cfg: DissipationConfig = DissipationConfig(),
) -> DissipationTimeEstimate:
    """First time every probe's L2 norm has halved; worst probe wins.

    The probe set approximates the supremum over mean-zero data in the
    dissipation-time definition; the worst probe's identity is reported
    so the approximation stays visible.
    """
    if kappa <= 0.0:
        raise ValueError("dissipation time requires kappa > 0")
    if not probes:
        raise ValueError("need at least one probe")
    grid = probes[0][1].grid
    if isinstance(flow, CellularFlow):
        results, residual = _halving_times_cellular(flow, kappa, probes, grid, cfg)
    else:
        results, residual = _halving_times_schedule(flow, kappa, probes, grid, cfg)
    per = tuple((label, results[label]) for label, _ in probes)
    worst_label, t_dis = max(per, key=lambda item: item[1])
    return DissipationTimeEstimate(
        t_dis=t_dis,
        kappa=kappa,
        per_probe=per,
        worst_probe=worst_label,
        balance_residual=residual,
    )


def energy_balance_residual(traj: Trajectory) -> float:
    """Max relative defect of l2(t)^2 - l2(0)^2 + 2*kappa*cum_dissipation(t)."""
    e0 = traj.l2[0] ** 2
    if e0 == 0.0:
        return 0.0
    defect = traj.l2**2 - e0 + 2.0 * traj.kappa * traj.cum_dissipation
    return float(np.max(np.abs(defect)) / e0)


def dissipated_fraction(traj: Trajectory) -> float:
    """Fraction of the initial L2 energy removed by diffusion by the final time."""
    e0 = traj.l2[0] ** 2
    if e0 == 0.0:
        return 0.0
    return float(2.0 * traj.kappa * traj.cum_dissipation[-1] / e0)


def hminus1_growth_ratio(traj: Trajectory) -> np.ndarray:
    """Interpolation ratio h1 * h_minus_1 / l2^2, bounded below by 1."""
    l2sq = traj.l2**2
    out = np.ones_like(l2sq)
    nz = l2sq > 0
    out[nz] = traj.h1[nz] * traj.h_minus_1[nz] / l2sq[nz]
    return out

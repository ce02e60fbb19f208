"""Incompressible velocity fields on the torus: shears, schedules, cells.

Two families are covered. Piecewise-shear flows (a profile translated
along one axis, possibly alternating axes step by step) admit exact
solution operators and are described by :class:`ShearSchedule`. The
steady cellular flow is given by a stream function and is evolved
pseudo-spectrally by the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np
from scipy import fft as _fft

from .field import Grid

__all__ = [
    "ShearProfile",
    "kolmogorov_profile",
    "tent_profile",
    "ShearStep",
    "ShearSchedule",
    "ZeroFlow",
    "ShearFlow",
    "PierrehumbertFlow",
    "AlternatingTentFlow",
    "CascadeFlow",
    "CellularFlow",
    "Flow",
    "pierrehumbert_schedule",
    "alternating_tent_schedule",
    "cascade_schedule",
    "subdivide_schedule",
    "schedule_for",
    "cellular_velocity",
    "velocity_on_grid",
    "max_speed",
    "divergence_residual",
]

AXIS_X1 = 0  # step displaces x1; profile depends on x2
AXIS_X2 = 1  # step displaces x2; profile depends on x1


@dataclass(frozen=True)
class ShearProfile:
    """One-dimensional 1-periodic velocity profile.

    Kinds
    -----
    ``harmonic``
        amplitude * sin(2*pi*frequency*x); the classical Kolmogorov
        profile is frequency 1.
    ``power_sine``
        amplitude * sin(pi*x)**m for even m >= 4; its critical point at
        x = 0 has the first m-1 derivatives vanishing.
    ``tent``
        piecewise-linear hat 2*amplitude*min(x, 1-x), height amplitude
        at x = 1/2, slope magnitude 2*amplitude everywhere.
    ``constant``
        uniform translation at speed amplitude.
    """

    kind: str
    amplitude: float = 1.0
    frequency: int = 1
    m: int = 2

    def __post_init__(self) -> None:
        if self.kind not in ("harmonic", "power_sine", "tent", "constant"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "harmonic" and self.frequency < 1:
            raise ValueError("harmonic frequency must be a positive integer")
        if self.kind == "power_sine" and (self.m < 4 or self.m % 2 != 0):
            raise ValueError("power_sine order m must be even and >= 4")

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64) % 1.0
        a = self.amplitude
        if self.kind == "harmonic":
            return a * np.sin(2.0 * np.pi * self.frequency * x)
        if self.kind == "power_sine":
            return a * np.sin(np.pi * x) ** self.m
        if self.kind == "tent":
            return 2.0 * a * np.minimum(x, 1.0 - x)
        return np.full_like(x, a)

    def derivative(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64) % 1.0
        a = self.amplitude
        if self.kind == "harmonic":
            w = 2.0 * np.pi * self.frequency
            return a * w * np.cos(w * x)
        if self.kind == "power_sine":
            return (
                a * self.m * np.pi
                * np.sin(np.pi * x) ** (self.m - 1) * np.cos(np.pi * x)
            )
        if self.kind == "tent":
            return np.where(x < 0.5, 2.0 * a, -2.0 * a)
        return np.zeros_like(x)

    def max_abs_value(self) -> float:
        return abs(self.amplitude)

    def max_abs_derivative(self) -> float:
        """Analytic sup of |profile'|, the shear's Lipschitz constant."""
        a = abs(self.amplitude)
        if self.kind == "harmonic":
            return 2.0 * np.pi * self.frequency * a
        if self.kind == "power_sine":
            # sup of m*pi*sin^(m-1)*cos, attained where tan^2 = m - 1.
            s = math.sqrt((self.m - 1.0) / self.m)
            c = math.sqrt(1.0 / self.m)
            return a * self.m * math.pi * s ** (self.m - 1) * c
        if self.kind == "tent":
            return 2.0 * a
        return 0.0


def kolmogorov_profile(m: int = 2, amplitude: float = 1.0) -> ShearProfile:
    """Shear profile with a critical point of order ``m``.

    ``m = 2`` is the Kolmogorov profile sin(2*pi*x); even ``m >= 4``
    gives sin(pi*x)**m whose degenerate critical point at x = 0 slows
    mixing to the t**(-1/m) rate.
    """
    if m == 2:
        return ShearProfile("harmonic", amplitude=amplitude, frequency=1)
    return ShearProfile("power_sine", amplitude=amplitude, m=m)


def tent_profile(amplitude: float = 1.0) -> ShearProfile:
    return ShearProfile("tent", amplitude=amplitude)


@dataclass(frozen=True)
class ShearStep:
    """One interval of constant shear: ``axis`` is displaced for ``duration``
    at speed ``profile(transverse - phase)``."""

    axis: int
    profile: ShearProfile
    duration: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.axis not in (AXIS_X1, AXIS_X2):
            raise ValueError(f"axis must be 0 (x1) or 1 (x2), got {self.axis}")
        if self.duration <= 0:
            raise ValueError("step duration must be positive")

    def speed_at(self, transverse: np.ndarray) -> np.ndarray:
        return self.profile.value(np.asarray(transverse) - self.phase)

    def speed_samples(self, grid: Grid) -> np.ndarray:
        return self.speed_at(grid.x)


@dataclass(frozen=True)
class ShearSchedule:
    """Finite sequence of shear steps executed in order."""

    steps: tuple[ShearStep, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("schedule must contain at least one step")

    @property
    def total_time(self) -> float:
        return float(sum(s.duration for s in self.steps))

    def sup_grad_inf(self) -> float:
        """sup over time of the analytic Lipschitz constant of the velocity."""
        return max(s.profile.max_abs_derivative() for s in self.steps)

    def max_speed(self) -> float:
        return max(s.profile.max_abs_value() for s in self.steps)

    def max_frequency(self) -> int:
        return max(
            s.profile.frequency if s.profile.kind == "harmonic" else 1
            for s in self.steps
        )

    def step_at(self, t: float) -> ShearStep | None:
        """Step active at time ``t``, or None past the end."""
        acc = 0.0
        for s in self.steps:
            acc += s.duration
            if t < acc - 1e-12:
                return s
        return None


@dataclass(frozen=True)
class ZeroFlow:
    """No advection; evolution is pure diffusion."""


@dataclass(frozen=True)
class ShearFlow:
    """Steady shear with a fixed profile, displacing ``axis``."""

    profile: ShearProfile
    axis: int = AXIS_X1


@dataclass(frozen=True)
class PierrehumbertFlow:
    """Random alternating sine shears with iid uniform phases.

    Step 2j displaces x1 at speed amplitude*sin(2*pi*(x2 - omega_1j)),
    step 2j+1 displaces x2 at speed amplitude*sin(2*pi*(x1 - omega_2j));
    each step lasts ``tau`` and the phases are drawn per pair from the
    counter-based Philox generator keyed by ``seed``.
    """

    amplitude: float = 1.0
    tau: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class AlternatingTentFlow:
    """Deterministic alternating tent shears, a simple exponential mixer."""

    amplitude: float = 1.0
    tau: float = 1.0


@dataclass(frozen=True)
class CascadeFlow:
    """Self-similar alternating-shear cascade toward a singular time T.

    Stage j uses spatial scale lambda_ratio**j (a reciprocal integer
    frequency), amplitude scale**alpha and duration proportional to
    scale**(1-alpha), normalized so the stage durations sum to T.
    """

    alpha: float
    T: float
    lambda_ratio: float = 0.5
    n_stages: int = 6
    seed: int = 0


@dataclass(frozen=True)
class CellularFlow:
    """Steady array of cells from H = A*eps*sin(2*pi*x1/eps)*sin(2*pi*x2/eps)."""

    A: float
    eps: float

    def __post_init__(self) -> None:
        inv = round(1.0 / self.eps)
        if inv < 1 or abs(self.eps * inv - 1.0) > 1e-12:
            raise ValueError(f"eps must be the reciprocal of an integer, got {self.eps}")


Flow = Union[
    ZeroFlow, ShearFlow, PierrehumbertFlow, AlternatingTentFlow, CascadeFlow,
    CellularFlow,
]


def pierrehumbert_schedule(flow: PierrehumbertFlow, n_steps: int) -> ShearSchedule:
    """Materialize the first ``n_steps`` shear steps of a Pierrehumbert flow.

    Phase draws are indexed by pair, so schedules of different lengths
    for the same seed agree on their common prefix.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    n_pairs = (n_steps + 1) // 2
    rng = np.random.Generator(np.random.Philox(key=flow.seed))
    omegas = rng.random((n_pairs, 2))
    profile = ShearProfile("harmonic", amplitude=flow.amplitude, frequency=1)
    steps = []
    for j in range(n_pairs):
        steps.append(ShearStep(AXIS_X1, profile, flow.tau, phase=float(omegas[j, 0])))
        steps.append(ShearStep(AXIS_X2, profile, flow.tau, phase=float(omegas[j, 1])))
    return ShearSchedule(tuple(steps[:n_steps]))


def alternating_tent_schedule(flow: AlternatingTentFlow, n_steps: int) -> ShearSchedule:
    profile = tent_profile(flow.amplitude)
    steps = tuple(
        ShearStep(AXIS_X1 if i % 2 == 0 else AXIS_X2, profile, flow.tau)
        for i in range(n_steps)
    )
    return ShearSchedule(steps)


def cascade_schedule(flow: CascadeFlow) -> ShearSchedule:
    """Build the full cascade schedule (duration exactly ``flow.T``).

    Stage j contributes an x1 and an x2 shear step of equal length with
    profiles amplitude_j * sin(2*pi*(x - phase)/lambda_j) and
    independent uniform phases.
    """
    if not 0.0 < flow.alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {flow.alpha}")
    if flow.T <= 0:
        raise ValueError("T must be positive")
    if flow.n_stages < 1:
        raise ValueError("n_stages must be >= 1")
    q = round(1.0 / flow.lambda_ratio)
    if q < 2 or abs(flow.lambda_ratio * q - 1.0) > 1e-12:
        raise ValueError(
            "lambda_ratio must be the reciprocal of an integer >= 2, "
            f"got {flow.lambda_ratio}"
        )
    lam = flow.lambda_ratio ** np.arange(flow.n_stages)
    weights = lam ** (1.0 - flow.alpha)
    durations = flow.T * weights / weights.sum()
    rng = np.random.Generator(np.random.Philox(key=flow.seed))
    omegas = rng.random((flow.n_stages, 2))
    steps = []
    for j in range(flow.n_stages):
        profile = ShearProfile(
            "harmonic", amplitude=float(lam[j] ** flow.alpha), frequency=q**j
        )
        half = float(durations[j]) / 2.0
        steps.append(ShearStep(AXIS_X1, profile, half, phase=float(omegas[j, 0])))
        steps.append(ShearStep(AXIS_X2, profile, half, phase=float(omegas[j, 1])))
    return ShearSchedule(tuple(steps))


def subdivide_schedule(schedule: ShearSchedule, max_dt: float) -> ShearSchedule:
    """Split every step into equal pieces no longer than ``max_dt``.

    The flow is unchanged (each piece keeps its step's profile, axis
    and phase); only the granularity seen by a splitting integrator
    improves. Exact at kappa = 0, shrinks the Strang splitting error
    for kappa > 0.
    """
    if max_dt <= 0:
        raise ValueError("max_dt must be positive")
    steps = []
    for step in schedule.steps:
        m = max(1, math.ceil(step.duration / max_dt - 1e-12))
        piece = replace(step, duration=step.duration / m)
        steps.extend([piece] * m)
    return ShearSchedule(tuple(steps))


def schedule_for(flow: Flow, horizon: float, step_hint: float = 0.25) -> ShearSchedule:
    """Shear schedule covering at least ``horizon`` time units.

    Steady flows (zero, shear) are chopped into steps of ``step_hint``
    so trajectories record at that cadence; schedule-defined flows use
    their own step structure. Cellular flows have no shear schedule.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if isinstance(flow, PierrehumbertFlow):
        return pierrehumbert_schedule(flow, math.ceil(horizon / flow.tau))
    if isinstance(flow, AlternatingTentFlow):
        return alternating_tent_schedule(flow, math.ceil(horizon / flow.tau))
    if isinstance(flow, CascadeFlow):
        return cascade_schedule(flow)
    if isinstance(flow, ZeroFlow):
        profile = ShearProfile("constant", amplitude=0.0)
        n = math.ceil(horizon / step_hint)
        return ShearSchedule(tuple(ShearStep(AXIS_X1, profile, step_hint) for _ in range(n)))
    if isinstance(flow, ShearFlow):
        n = math.ceil(horizon / step_hint)
        return ShearSchedule(
            tuple(ShearStep(flow.axis, flow.profile, step_hint) for _ in range(n))
        )
    raise TypeError(f"{type(flow).__name__} has no shear schedule")


def cellular_velocity(
    A: float, eps: float, x1: np.ndarray, x2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Velocity (u1, u2) of the cellular stream function at given points."""
    w = 2.0 * np.pi / eps
    u1 = -2.0 * np.pi * A * np.sin(w * x1) * np.cos(w * x2)
    u2 = 2.0 * np.pi * A * np.cos(w * x1) * np.sin(w * x2)
    return u1, u2


def velocity_on_grid(
    flow: Flow, grid: Grid, t: float = 0.0
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the velocity field at time ``t`` on the grid."""
    zeros = np.zeros((grid.n, grid.n))
    if isinstance(flow, ZeroFlow):
        return zeros, zeros.copy()
    if isinstance(flow, CellularFlow):
        x1, x2 = grid.mesh()
        u1, u2 = cellular_velocity(flow.A, flow.eps, x1, x2)
        return (
            np.broadcast_to(u1, (grid.n, grid.n)).copy(),
            np.broadcast_to(u2, (grid.n, grid.n)).copy(),
        )
    if isinstance(flow, ShearFlow):
        step = ShearStep(flow.axis, flow.profile, duration=1.0)
    else:
        schedule = schedule_for(flow, horizon=max(t, 1e-9) + 1.0)
        active = schedule.step_at(t)
        if active is None:
            return zeros, zeros.copy()
        step = active
    v = step.speed_samples(grid)
    if step.axis == AXIS_X1:
        u1 = np.broadcast_to(v.reshape(grid.n, 1), (grid.n, grid.n)).copy()
        return u1, zeros
    u2 = np.broadcast_to(v.reshape(1, grid.n), (grid.n, grid.n)).copy()
    return zeros, u2


def max_speed(flow: Flow) -> float:
    """Analytic sup-norm of the velocity (time-uniform for schedules)."""
    if isinstance(flow, ZeroFlow):
        return 0.0
    if isinstance(flow, CellularFlow):
        return 2.0 * np.pi * abs(flow.A)
    if isinstance(flow, ShearFlow):
        return flow.profile.max_abs_value()
    if isinstance(flow, (PierrehumbertFlow, AlternatingTentFlow)):
        return abs(flow.amplitude)
    if isinstance(flow, CascadeFlow):
        return cascade_schedule(flow).max_speed()
    raise TypeError(f"unknown flow {type(flow).__name__}")


def divergence_residual(flow: Flow, grid: Grid, t: float = 0.0) -> float:
    """Max-norm of the spectral divergence of the sampled velocity."""
    u1, u2 = velocity_on_grid(flow, grid, t)
    n2 = grid.n**2
    s1 = _fft.fft2(u1) / n2
    s2 = _fft.fft2(u2) / n2
    keep = ~grid.nyquist_mask
    div = 2j * np.pi * (grid.k1 * s1 + grid.k2 * s2) * keep
    return float(np.max(np.abs(_fft.ifft2(div * n2))))

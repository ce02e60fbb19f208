"""mixlab: a numerical laboratory for passive-scalar mixing on the 2D torus.

Simulates transport and advection-diffusion of mean-zero scalars under a
catalog of incompressible flows (steady and alternating shears, cellular
arrays, random alternating shears, a self-similar shear cascade) and
measures mix-norm decay rates, dissipation times, energy balances, and
anomalous-dissipation fractions. A stochastic-Lagrangian Monte Carlo
oracle cross-validates the spectral solver, and a chemotaxis module
demonstrates suppression of blow-up by mixing.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .field import (
    Grid,
    ScalarField,
    gaussian_packet,
    grad_l2,
    l2_norm,
    mode_field,
    project_mean_zero,
    project_zero_x1_average,
    random_band_limited,
    read_snapshot,
    sobolev_norm,
    write_snapshot,
)
from .flows import (
    AlternatingTentFlow,
    CascadeFlow,
    CellularFlow,
    Flow,
    PierrehumbertFlow,
    ShearFlow,
    ShearProfile,
    ShearSchedule,
    ShearStep,
    ZeroFlow,
    alternating_tent_schedule,
    cascade_schedule,
    cellular_velocity,
    divergence_residual,
    kolmogorov_profile,
    max_speed,
    pierrehumbert_schedule,
    schedule_for,
    tent_profile,
    velocity_on_grid,
)
from .solver import (
    NumericalBlowupError,
    ResolutionError,
    SolverConfig,
    StabilityError,
    Trajectory,
    advance_autonomous,
    advance_cellular_split,
    advance_schedule,
    cellular_split_dt,
    diffusion_multiplier,
    exact_shear_step,
    stability_bound_dt,
)
from .diagnostics import (
    DissipationConfig,
    DissipationTimeEstimate,
    FitResult,
    dissipated_fraction,
    dissipation_time,
    energy_balance_residual,
    fit_exponential,
    fit_power_law,
    hminus1_growth_ratio,
    packet_probe_set,
    probe_set,
)
from .lagrangian import McConfig, McResult, feynman_kac_estimate
from .keller_segel import (
    KsConfig,
    KsState,
    KsTrajectory,
    bump_density,
    chemoattractant_solve,
    ks_advance,
)
from .experiments import (
    ExperimentConfig,
    Report,
    load_config,
    run_scenario,
    validate_config,
)

__all__ = [
    "__version__",
    # field
    "Grid", "ScalarField", "l2_norm", "sobolev_norm", "grad_l2",
    "project_mean_zero", "project_zero_x1_average", "mode_field",
    "random_band_limited", "gaussian_packet", "read_snapshot", "write_snapshot",
    # flows
    "ShearProfile", "kolmogorov_profile", "tent_profile", "ShearStep",
    "ShearSchedule", "ZeroFlow", "ShearFlow", "PierrehumbertFlow",
    "AlternatingTentFlow", "CascadeFlow", "CellularFlow", "Flow",
    "pierrehumbert_schedule", "alternating_tent_schedule", "cascade_schedule",
    "schedule_for", "cellular_velocity", "velocity_on_grid", "max_speed",
    "divergence_residual",
    # solver
    "SolverConfig", "Trajectory", "StabilityError", "ResolutionError",
    "NumericalBlowupError", "exact_shear_step", "diffusion_multiplier",
    "advance_schedule", "advance_autonomous", "advance_cellular_split",
    "cellular_split_dt", "stability_bound_dt",
    # diagnostics
    "FitResult", "fit_power_law", "fit_exponential", "DissipationConfig",
    "DissipationTimeEstimate", "probe_set", "packet_probe_set",
    "dissipation_time", "energy_balance_residual", "dissipated_fraction",
    "hminus1_growth_ratio",
    # lagrangian
    "McConfig", "McResult", "feynman_kac_estimate",
    # keller_segel
    "KsConfig", "KsState", "KsTrajectory", "bump_density",
    "chemoattractant_solve", "ks_advance",
    # experiments
    "ExperimentConfig", "Report", "load_config", "run_scenario",
    "validate_config",
]

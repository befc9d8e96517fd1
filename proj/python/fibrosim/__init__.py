"""Multiphase tumor growth and tissue fibrosis model."""

from ._core import (
    EquilibriumReport,
    FibrosimError,
    ModelParams,
    Population,
    Scenario,
    Trajectory,
    VolumeState,
    classify_initial,
    gamma_roots,
    growth_rate,
    integrate_picard,
    integrate_rk,
    matrix_rate,
    mixed_equilibrium_scan,
    nontrivial_equilibrium,
    preset_scenario,
    run_scenario,
    trivial_equilibrium,
    validate_params,
)

__all__ = [
    "EquilibriumReport",
    "FibrosimError",
    "ModelParams",
    "Population",
    "Scenario",
    "Trajectory",
    "VolumeState",
    "classify_initial",
    "gamma_roots",
    "growth_rate",
    "integrate_picard",
    "integrate_rk",
    "matrix_rate",
    "mixed_equilibrium_scan",
    "nontrivial_equilibrium",
    "preset_scenario",
    "run_scenario",
    "trivial_equilibrium",
    "validate_params",
]

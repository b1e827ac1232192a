"""Bottleneck (L-infinity) optimal transport: solvers and monotonicity certificates."""

from ._core import (
    Certificate,
    ConfigError,
    Cost,
    Coupling,
    Measure,
    brute_force_bottleneck,
    brute_force_icm,
    check_icm,
    check_im,
    extract_map,
    grid_measure,
    run_config,
    run_p_schedule,
    solve_bottleneck,
    solve_p,
    uniqueness_gap,
)

__all__ = [
    "Certificate",
    "ConfigError",
    "Cost",
    "Coupling",
    "Measure",
    "brute_force_bottleneck",
    "brute_force_icm",
    "check_icm",
    "check_im",
    "extract_map",
    "grid_measure",
    "run_config",
    "run_p_schedule",
    "solve_bottleneck",
    "solve_p",
    "uniqueness_gap",
]

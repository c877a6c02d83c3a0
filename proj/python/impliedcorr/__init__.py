"""Implied correlation matrices with factor structure.

Thin wrapper over the C++ core. Matrices are numpy float64 arrays; a market
is described by ``sigma`` (asset implied vols), ``weights`` (index weights)
and ``variance`` (index implied variance).
"""

from ._core import (
    ConvergenceError,
    IoError,
    ValidationError,
    adjusted_ex_post,
    assemble_correlation,
    check_feasibility,
    constraint_residual,
    direct_to_centered_corr,
    economic_implied_corr,
    equicorrelation,
    generate_synthetic_market,
    initial_loadings,
    project_feasible,
    solve_nicm,
    vg_market_constraint,
)

__all__ = [
    "ConvergenceError",
    "IoError",
    "ValidationError",
    "adjusted_ex_post",
    "assemble_correlation",
    "check_feasibility",
    "constraint_residual",
    "direct_to_centered_corr",
    "economic_implied_corr",
    "equicorrelation",
    "generate_synthetic_market",
    "initial_loadings",
    "project_feasible",
    "solve_nicm",
    "vg_market_constraint",
]

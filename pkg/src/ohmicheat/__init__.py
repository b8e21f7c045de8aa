"""Numerical laboratory for the nonlocal Ohmic-heating model

    u_t = Delta u + lambda f(u) / (int_Omega f(u) dx)^p

with homogeneous Dirichlet data on intervals and balls: steady states and
the bifurcation curve lambda(mu), the critical value lambda*, time
evolution with blow-up detection and regime classification, quasi-steady
comparison envelopes, and the closed-form blow-up rate laws.
"""

from .domain import Ball, DomainSpec, Interval, critical_lambda_p2
from .nonlinearity import (
    AdmissibilityReport,
    Nonlinearity,
    check_admissible,
    eval_F,
    eval_f,
)
from .steady import (
    BranchTable,
    LambdaStar,
    SteadyBranch,
    SteadyProfile,
    boundary_flux_ratio,
    default_mu_grid,
    lambda_of_mu,
    lambda_star,
    mu_of_M_flat,
    solve_branch_table,
    solve_nonlocal_steady,
    solve_radial_steady,
    trace_branch,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "DomainSpec",
    "Interval",
    "critical_lambda_p2",
    "AdmissibilityReport",
    "Nonlinearity",
    "check_admissible",
    "eval_F",
    "eval_f",
    "BranchTable",
    "LambdaStar",
    "SteadyBranch",
    "SteadyProfile",
    "boundary_flux_ratio",
    "default_mu_grid",
    "lambda_of_mu",
    "lambda_star",
    "mu_of_M_flat",
    "solve_branch_table",
    "solve_nonlocal_steady",
    "solve_radial_steady",
    "trace_branch",
]

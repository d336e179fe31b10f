"""Liesegang ring simulator in parabolic similarity coordinates.

A library and CLI for a fast-precipitation limit of a classical
Liesegang ring model: a 1-D heat equation with a point source moving
along x = alpha*sqrt(t) and a precipitation sink that switches on
permanently above a concentration threshold.  The package evaluates
the closed-form self-similar profiles, solves the sink-strength
matching condition, time-steps the implicit similarity-coordinate
scheme, and measures long-time convergence diagnostics.
"""

from .diagnostics import (
    DiagnosticsRecord,
    DiagnosticsSample,
    discrete_gamma_tail,
    discrete_h,
    precipitation_extent,
    select_target,
    sup_error,
    target_on_grid,
)
from .errors import (
    InvalidGrid,
    InvalidParameter,
    LiesegangError,
    NegativeGamma,
    NonConvergence,
    NoRoot,
    NotSupercritical,
    OutOfRange,
    ParseError,
    SingularPivot,
    ValidationError,
)
from .profiles import (
    ModelParams,
    Regime,
    SelfSimilarProfile,
    alpha_star,
    classify_regime,
    gamma_of_ustar,
    kappa_of_gamma,
    make_profile,
    phi_gamma,
    phi_gamma_derivative,
    psi,
    ustar_of_gamma,
)
from .solver import (
    Grid,
    SolverState,
    TridiagonalSystem,
    assemble_system,
    build_grid,
    initial_state,
    psi_on_grid,
    run,
    step,
    thomas_solve,
    update_precipitation,
)
from .specfun import Accuracy, erfc, kummer_m

__version__ = "0.1.0"

__all__ = [
    "Accuracy",
    "DiagnosticsRecord",
    "DiagnosticsSample",
    "Grid",
    "InvalidGrid",
    "InvalidParameter",
    "LiesegangError",
    "ModelParams",
    "NegativeGamma",
    "NoRoot",
    "NonConvergence",
    "NotSupercritical",
    "OutOfRange",
    "ParseError",
    "Regime",
    "SelfSimilarProfile",
    "SingularPivot",
    "SolverState",
    "TridiagonalSystem",
    "ValidationError",
    "alpha_star",
    "assemble_system",
    "build_grid",
    "classify_regime",
    "discrete_gamma_tail",
    "discrete_h",
    "erfc",
    "gamma_of_ustar",
    "initial_state",
    "kappa_of_gamma",
    "kummer_m",
    "make_profile",
    "phi_gamma",
    "phi_gamma_derivative",
    "precipitation_extent",
    "psi",
    "psi_on_grid",
    "run",
    "select_target",
    "step",
    "sup_error",
    "target_on_grid",
    "thomas_solve",
    "update_precipitation",
    "ustar_of_gamma",
]

"""Shift-and-invert PCA solvers.

Thin wrapper over the C++ core: leading-eigenvector (gap mode) and
leading-eigenvalue (gap-free mode) drivers, the exact and SVRG quadratic
solvers they are built on, and the dense desk-scale oracle.
"""

from ._core import (
    CovarianceOperator,
    GuardError,
    InputError,
    NoGapError,
    ToleranceError,
    dense_eigenvalues,
    exact_solve,
    gapfree_eigenvalue,
    ingest,
    pm_iterations_accurate,
    pm_iterations_crude,
    pm_iterations_span,
    run_json,
    search_delta_hat,
    shrink_exact,
    shrink_inexact,
    svrg_solve,
)

__all__ = [
    "CovarianceOperator",
    "GuardError",
    "InputError",
    "NoGapError",
    "ToleranceError",
    "dense_eigenvalues",
    "exact_solve",
    "gapfree_eigenvalue",
    "ingest",
    "pm_iterations_accurate",
    "pm_iterations_crude",
    "pm_iterations_span",
    "run_json",
    "search_delta_hat",
    "shrink_exact",
    "shrink_inexact",
    "svrg_solve",
]

__version__ = "0.1.0"

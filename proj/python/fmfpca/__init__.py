"""Fully modified FPCA and dimension tests for cointegrated functional time series.

Curves are passed as a grid (1-D array of abscissae, trapezoid weights) and a
T x p array whose rows are observations.
"""

from ._core import (
    CriticalValueTable,
    FmfpcaError,
    attractor_in_subspace_test,
    clr,
    critical_values,
    dimension_test,
    generate_path,
    inverse_clr,
    kpss_core,
    logit,
    modified_fpca,
    ordinary_fpca,
    sequential_dimension,
    simulate_limit_draws,
    subspace_in_attractor_test,
)

__all__ = [
    "CriticalValueTable",
    "FmfpcaError",
    "attractor_in_subspace_test",
    "clr",
    "critical_values",
    "dimension_test",
    "generate_path",
    "inverse_clr",
    "kpss_core",
    "logit",
    "modified_fpca",
    "ordinary_fpca",
    "sequential_dimension",
    "simulate_limit_draws",
    "subspace_in_attractor_test",
]

"""Penalised regression solvers: LASSO, nuclear-norm trace regression, SVD/SVT."""

from batchbandit.solvers.lasso import (
    LassoSolution,
    lasso_fit,
    lasso_fit_gram,
    lasso_kkt_residual,
    lasso_objective,
)
from batchbandit.solvers.linalg import SvdResult, nuclear_norm, soft_threshold, svd, svt
from batchbandit.solvers.trace_regression import (
    TraceRegSolution,
    trace_objective,
    trace_regression_fit,
    trace_regression_gram,
)

__all__ = [
    "LassoSolution",
    "SvdResult",
    "TraceRegSolution",
    "lasso_fit",
    "lasso_fit_gram",
    "lasso_kkt_residual",
    "lasso_objective",
    "nuclear_norm",
    "soft_threshold",
    "svd",
    "svt",
    "trace_objective",
    "trace_regression_fit",
    "trace_regression_gram",
]

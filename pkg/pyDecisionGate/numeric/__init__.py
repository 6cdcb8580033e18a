"""Numerical kernel: normal and chi-square distribution functions, matrix helpers, seeded sampling."""

from pyDecisionGate.numeric.distributions import (
    chi_square_sf,
    std_normal_cdf,
    std_normal_quantile,
    std_normal_sf,
    upper_critical,
)
from pyDecisionGate.numeric.linalg import CorrelationMatrix, cholesky_lower, symmetric_eigenvalues
from pyDecisionGate.numeric.random import RandomStream, sample_mv_normal, sample_mv_normal_batch

__all__ = [
    "CorrelationMatrix",
    "RandomStream",
    "chi_square_sf",
    "cholesky_lower",
    "sample_mv_normal",
    "sample_mv_normal_batch",
    "std_normal_cdf",
    "std_normal_quantile",
    "std_normal_sf",
    "symmetric_eigenvalues",
    "upper_critical",
]

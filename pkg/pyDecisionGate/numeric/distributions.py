import math

from scipy import special, stats

from pyDecisionGate.errors import DomainError


def _ensure_finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    return value


def std_normal_cdf(z: float) -> float:
    z = _ensure_finite(z, "z")
    return float(special.ndtr(z))


def std_normal_sf(z: float) -> float:
    """Upper tail 1 - Phi(z), accurate far in the tail."""
    z = _ensure_finite(z, "z")
    return float(special.ndtr(-z))


def std_normal_quantile(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"Probability must be in (0, 1), got {p}")
    return float(special.ndtri(p))


def upper_critical(alpha: float) -> float:
    """z_{1-alpha}: the one-sided critical value for level alpha."""
    return -std_normal_quantile(alpha)


def chi_square_sf(x: float, df: int) -> float:
    x = _ensure_finite(x, "x")
    if x < 0:
        raise DomainError(f"Chi-square statistic must be >= 0, got {x}")
    if df < 1:
        raise DomainError(f"Degrees of freedom must be >= 1, got {df}")
    return float(stats.chi2.sf(x, df))

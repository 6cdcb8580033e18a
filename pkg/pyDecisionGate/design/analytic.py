"""Closed-form error rates of Decision Rule 1 and the deterioration risk of success metrics."""

from enum import StrEnum

from pyDecisionGate.design.model import MetricCounts, RiskBudget
from pyDecisionGate.errors import DomainError
from pyDecisionGate.numeric import std_normal_cdf, std_normal_quantile, upper_critical

DETERIORATION_LEVELS = (0.2, 0.3, 0.4, 0.5)
DETERIORATION_SIZES = (2, 5, 10, 20, 30)


class AnalyticStructure(StrEnum):
    INDEPENDENT = "independent"
    PERFECTLY_CORRELATED = "perfectly_correlated"


def _type1(counts: MetricCounts, alpha: float, structure: AnalyticStructure, corrected: bool) -> float:
    S, G = counts.S, counts.G
    alpha_success = alpha / S if corrected and S > 0 else alpha
    if structure == AnalyticStructure.PERFECTLY_CORRELATED:
        return alpha_success if S > 0 else alpha
    if S == 0:
        return alpha**G
    any_success = 1.0 - (1.0 - alpha_success) ** S
    return alpha**G * any_success


def _power(counts: MetricCounts, beta: float, structure: AnalyticStructure, corrected: bool) -> float:
    S, G = counts.S, counts.G
    if corrected:
        beta = beta / (G + 1) if S > 0 else beta / G
    if structure == AnalyticStructure.PERFECTLY_CORRELATED:
        return 1.0 - beta
    guardrails = (1.0 - beta) ** G
    if S == 0:
        return guardrails
    return guardrails * (1.0 - beta**S)


def analytic_rule1_error_rates(
    counts: MetricCounts,
    budget: RiskBudget,
    structure: AnalyticStructure | str,
    corrected: bool,
) -> tuple[float, float]:
    """Type I error and power of Decision Rule 1 at the design alternative.

    The type I error is taken at the boundary of the global null where every guardrail sits
    at its margin and every success metric at zero. Independent or perfectly correlated
    metrics only, without deterioration or quality tests.
    """
    structure = AnalyticStructure(structure)
    if counts.D != 0 or counts.Q != 0:
        raise DomainError("Closed-form Decision Rule 1 rates require D = Q = 0")
    if not counts.has_powered_metrics():
        raise DomainError("Closed-form Decision Rule 1 rates require S + G >= 1")
    return (
        _type1(counts, budget.alpha, structure, corrected),
        _power(counts, budget.beta, structure, corrected),
    )


def deterioration_prob_under_alternative(S: int, alpha_plus: float, alpha_minus: float, beta: float) -> float:
    """Chance that any of the S - 1 not necessarily superior success metrics deteriorates significantly.

    Levels use S as the only denominator: alpha_plus / S for superiority and alpha_minus / S
    for the inferiority tests.
    """
    if S < 2:
        raise DomainError(f"At least two success metrics are required, got {S}")
    for name, value in (("alpha_plus", alpha_plus), ("alpha_minus", alpha_minus), ("beta", beta)):
        if not 0.0 < value < 1.0:
            raise DomainError(f"{name} must be in (0, 1), got {value}")
    shift = std_normal_quantile(alpha_minus / S) - upper_critical(alpha_plus / S) - upper_critical(beta)
    return (S - 1) * std_normal_cdf(shift)


def deterioration_probability_table(
    alpha_plus: float = 0.1,
    levels: tuple[float, ...] = DETERIORATION_LEVELS,
    sizes: tuple[int, ...] = DETERIORATION_SIZES,
) -> dict[float, dict[int, float]]:
    """Rows keyed by beta = alpha_minus, columns by the number of success metrics."""
    return {
        level: {size: deterioration_prob_under_alternative(size, alpha_plus, level, level) for size in sizes}
        for level in levels
    }


def figure_power_curve(max_guardrails: int = 25, beta: float = 0.2, corrected: bool = False) -> dict[int, float]:
    """Power to reject all G non-inferiority nulls at once for independent guardrails."""
    if max_guardrails < 1:
        raise DomainError(f"At least one guardrail is required, got {max_guardrails}")
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must be in (0, 1), got {beta}")
    curve = {}
    for guardrails in range(1, max_guardrails + 1):
        individual = beta / guardrails if corrected else beta
        curve[guardrails] = (1.0 - individual) ** guardrails
    return curve

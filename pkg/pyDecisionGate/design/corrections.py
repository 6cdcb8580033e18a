"""Significance levels and power targets implied by the decision rules.

Every correction accepts optional effective counts for the success and guardrail blocks.
They default to S and G; the Nyholt adjustment passes M_E(Sigma_S) and M_E(Sigma_G) instead.
"""

from pyDecisionGate.design.model import Correction, MetricCounts, RiskBudget
from pyDecisionGate.errors import PlanningError


def _divisors(counts: MetricCounts, success: float | None, guardrail: float | None) -> tuple[float, float]:
    return (
        float(counts.S) if success is None else float(success),
        float(counts.G) if guardrail is None else float(guardrail),
    )


def _require_powered(counts: MetricCounts) -> None:
    if not counts.has_powered_metrics():
        raise PlanningError("At least one success or guardrail metric is required (S + G >= 1)")


def _alpha_success(counts: MetricCounts, alpha: float, success_divisor: float) -> float | None:
    if counts.S == 0:
        return None
    return alpha / success_divisor


def _alpha_guardrail(counts: MetricCounts, alpha: float) -> float | None:
    if counts.G == 0:
        return None
    return alpha


def _beta_star(counts: MetricCounts, beta: float, phi: float, guardrail_divisor: float) -> float:
    """(beta - phi) / ((1 - phi) * (G + 1)), or divided by G when there are no success metrics."""
    groups = guardrail_divisor + 1.0 if counts.S > 0 else guardrail_divisor
    return (beta - phi) / ((1.0 - phi) * groups)


def _alpha_minus_star(counts: MetricCounts, alpha_minus: float, deterioration_divisor: float | None) -> float:
    divisor = float(counts.total) if deterioration_divisor is None else deterioration_divisor
    return alpha_minus / divisor


def correct_none(counts: MetricCounts, budget: RiskBudget) -> Correction:
    _require_powered(counts)
    return Correction(
        alpha_success=_alpha_success(counts, budget.alpha, 1.0),
        alpha_guardrail=_alpha_guardrail(counts, budget.alpha),
        alpha_minus_star=budget.alpha_minus,
        beta_star=budget.beta,
    )


def correct_only_alpha(
    counts: MetricCounts,
    budget: RiskBudget,
    success: float | None = None,
    deterioration_divisor: float | None = None,
) -> Correction:
    _require_powered(counts)
    success_divisor, _ = _divisors(counts, success, None)
    return Correction(
        alpha_success=_alpha_success(counts, budget.alpha, success_divisor),
        alpha_guardrail=_alpha_guardrail(counts, budget.alpha),
        alpha_minus_star=_alpha_minus_star(counts, budget.alpha_minus, deterioration_divisor),
        beta_star=budget.beta,
    )


def correct_prop33(
    counts: MetricCounts,
    budget: RiskBudget,
    success: float | None = None,
    guardrail: float | None = None,
) -> Correction:
    if counts.D != 0 or counts.Q != 0:
        raise PlanningError("The success/guardrail-only correction requires D = Q = 0")
    _require_powered(counts)
    success_divisor, guardrail_divisor = _divisors(counts, success, guardrail)
    return Correction(
        alpha_success=_alpha_success(counts, budget.alpha, success_divisor),
        alpha_guardrail=_alpha_guardrail(counts, budget.alpha),
        alpha_minus_star=None,
        beta_star=_beta_star(counts, budget.beta, 0.0, guardrail_divisor),
    )


def correct_prop41(
    counts: MetricCounts,
    budget: RiskBudget,
    success: float | None = None,
    guardrail: float | None = None,
    deterioration_divisor: float | None = None,
    phi: float | None = None,
) -> Correction:
    _require_powered(counts)
    if budget.alpha_minus >= budget.beta:
        raise PlanningError(
            "beta budget exhausted by deterioration/quality tests: alpha_minus must be < beta"
        )
    success_divisor, guardrail_divisor = _divisors(counts, success, guardrail)
    return Correction(
        alpha_success=_alpha_success(counts, budget.alpha, success_divisor),
        alpha_guardrail=_alpha_guardrail(counts, budget.alpha),
        alpha_minus_star=_alpha_minus_star(counts, budget.alpha_minus, deterioration_divisor),
        beta_star=_beta_star(counts, budget.beta, budget.alpha_minus if phi is None else phi, guardrail_divisor),
    )


def improvement_phi(counts: MetricCounts, alpha_minus: float, use_remark: bool = False) -> float:
    if use_remark:
        share = counts.D + counts.Q
    else:
        share = max(counts.D + counts.S + counts.Q - 1, 0)
    return share / counts.total * alpha_minus


def guardrail_variant_phi(counts: MetricCounts, alpha_minus: float) -> float:
    """Adjustment for guardrails allowed a type II error below alpha_minus."""
    denominator = counts.S + counts.G + counts.D
    if denominator == 0:
        return 0.0
    return max(counts.S - 1 + counts.G + counts.D, 0) / denominator * alpha_minus


def _check_improved_budget(budget: RiskBudget) -> None:
    if budget.alpha_minus > 1.0 - budget.alpha:
        raise PlanningError("alpha_minus must be <= 1 - alpha")
    if budget.alpha_minus > budget.beta:
        raise PlanningError("alpha_minus must be <= beta")


def _improved(
    counts: MetricCounts,
    budget: RiskBudget,
    phi: float,
    success: float | None,
    guardrail: float | None,
    deterioration_divisor: float | None,
) -> Correction:
    _require_powered(counts)
    _check_improved_budget(budget)
    success_divisor, guardrail_divisor = _divisors(counts, success, guardrail)
    alpha_minus_star = _alpha_minus_star(counts, budget.alpha_minus, deterioration_divisor)
    alpha_success = None
    if counts.S > 0:
        inflation = 1.0
        if counts.S + counts.D >= 2:
            inflation = 1.0 - budget.alpha_minus / counts.total
        alpha_success = budget.alpha / (inflation * success_divisor)
    return Correction(
        alpha_success=alpha_success,
        alpha_guardrail=_alpha_guardrail(counts, budget.alpha),
        alpha_minus_star=alpha_minus_star,
        beta_star=_beta_star(counts, budget.beta, phi, guardrail_divisor),
    )


def correct_prop41_improved(
    counts: MetricCounts,
    budget: RiskBudget,
    use_remark: bool = False,
    success: float | None = None,
    guardrail: float | None = None,
    deterioration_divisor: float | None = None,
    phi: float | None = None,
) -> Correction:
    if phi is None:
        phi = improvement_phi(counts, budget.alpha_minus, use_remark=use_remark)
    return _improved(counts, budget, phi, success, guardrail, deterioration_divisor)


def correct_prop41_guardrail(
    counts: MetricCounts,
    budget: RiskBudget,
    success: float | None = None,
    guardrail: float | None = None,
    deterioration_divisor: float | None = None,
    phi: float | None = None,
) -> Correction:
    if phi is None:
        phi = guardrail_variant_phi(counts, budget.alpha_minus)
    return _improved(counts, budget, phi, success, guardrail, deterioration_divisor)

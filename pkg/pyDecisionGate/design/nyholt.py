"""Effective number of independent tests from the eigenvalue spread of a correlation matrix."""

import logging

import numpy as np

from pyDecisionGate import design
from pyDecisionGate.design.model import Correction, CorrectionKind, CorrectionPolicy, MetricCounts, RiskBudget
from pyDecisionGate.errors import PlanningError
from pyDecisionGate.numeric import CorrelationMatrix, symmetric_eigenvalues

logger = logging.getLogger(__name__)


def nyholt_effective_tests(corr: CorrelationMatrix) -> float:
    """M_E = 1 + (M - 1) * (1 - V / M), V being the sample variance of the eigenvalues."""
    size = corr.dim
    if size == 1:
        return 1.0
    eigenvalues = np.asarray(symmetric_eigenvalues(corr))
    spread = float(np.var(eigenvalues, ddof=1))
    effective = 1.0 + (size - 1) * (1.0 - spread / size)
    return float(np.clip(effective, 1.0, size))


def _effective(corr: CorrelationMatrix | None, count: int, block: str) -> float | None:
    if count == 0:
        return None
    if corr is None:
        return float(count)
    if corr.dim != count:
        raise PlanningError(f"{block} correlation matrix has dimension {corr.dim}, expected {count}")
    return nyholt_effective_tests(corr)


def effective_counts(
    counts: MetricCounts,
    corr_success: CorrelationMatrix | None,
    corr_guardrail: CorrelationMatrix | None,
) -> dict[str, float]:
    values = {}
    success = _effective(corr_success, counts.S, "Success")
    guardrail = _effective(corr_guardrail, counts.G, "Guardrail")
    if success is not None:
        values["success"] = success
    if guardrail is not None:
        values["guardrail"] = guardrail
    return values


def apply_nyholt(
    counts: MetricCounts,
    budget: RiskBudget,
    policy: CorrectionPolicy,
    corr_success: CorrelationMatrix | None = None,
    corr_guardrail: CorrelationMatrix | None = None,
) -> Correction:
    """Correction of `policy` with S and G replaced by their effective counts.

    The alpha division over success metrics and the beta division over guardrails change, and the
    beta adjustment phi takes the effective counts as well (see `effective_phi`). With
    `policy.nyholt_deterioration` the deterioration level divides by M_E(S) + M_E(G) + D + Q.
    """
    effective = effective_counts(counts, corr_success, corr_guardrail)
    success = effective.get("success")
    guardrail = effective.get("guardrail")
    logger.debug("Effective tests: success=%s guardrail=%s", success, guardrail)
    correct = design.get(policy.kind)
    if policy.kind == CorrectionKind.NONE:
        return correct(counts, budget)
    if policy.kind == CorrectionKind.ONLY_ALPHA:
        divisor = _deterioration_divisor(counts, policy, success, guardrail)
        return correct(counts, budget, success=success, deterioration_divisor=divisor)
    if policy.kind == CorrectionKind.PROP33:
        return correct(counts, budget, success=success, guardrail=guardrail)
    return correct(
        counts,
        budget,
        success=success,
        guardrail=guardrail,
        deterioration_divisor=_deterioration_divisor(counts, policy, success, guardrail),
        phi=effective_phi(policy.kind, counts, budget.alpha_minus, success, guardrail),
    )


def _deterioration_divisor(
    counts: MetricCounts,
    policy: CorrectionPolicy,
    success: float | None,
    guardrail: float | None,
) -> float | None:
    if not policy.nyholt_deterioration:
        return None
    return (success or 0.0) + (guardrail or 0.0) + counts.D + counts.Q


def effective_phi(
    kind: CorrectionKind,
    counts: MetricCounts,
    alpha_minus: float,
    success: float | None,
    guardrail: float | None,
) -> float:
    """Beta adjustment of the non-overlapping correction with S and G replaced by effective counts.

    Prop41 takes the same adjustment as Prop41Improved.
    """
    s = success or 0.0
    g = guardrail or 0.0
    if kind == CorrectionKind.PROP41_GUARDRAIL:
        denominator = s + g + counts.D
        if denominator == 0.0:
            return 0.0
        return max(s - 1.0 + g + counts.D, 0.0) / denominator * alpha_minus
    total = s + g + counts.D + counts.Q
    if kind == CorrectionKind.PROP41_IMPROVED_REMARK:
        share = float(counts.D + counts.Q)
    else:
        share = max(counts.D + s + counts.Q - 1.0, 0.0)
    return share / total * alpha_minus

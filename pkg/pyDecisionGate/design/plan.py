import logging
from collections.abc import Iterable

from pyDecisionGate import design
from pyDecisionGate.design.model import (
    Correction,
    CorrectionKind,
    CorrectionPolicy,
    DesignPlan,
    MetricCounts,
    PlannedTest,
    RiskBudget,
)
from pyDecisionGate.design.nyholt import apply_nyholt, effective_counts
from pyDecisionGate.errors import ConfigurationError, PlanningError
from pyDecisionGate.hypothesis import achieved_power, required_sample_size
from pyDecisionGate.model import MetricSpec, TestKind, make_test_id
from pyDecisionGate.numeric import CorrelationMatrix

logger = logging.getLogger(__name__)


def count_metrics(metrics: Iterable[MetricSpec]) -> MetricCounts:
    metrics = list(metrics)
    return MetricCounts(
        S=sum(1 for metric in metrics if metric.is_success()),
        G=sum(1 for metric in metrics if metric.is_guardrail()),
        D=sum(1 for metric in metrics if metric.is_extra_deterioration()),
        Q=sum(1 for metric in metrics if metric.is_quality()),
    )


def _sorted_unique(metrics: Iterable[MetricSpec]) -> list[MetricSpec]:
    seen = set()
    for index, metric in enumerate(metrics):
        if metric.id in seen:
            raise ConfigurationError(f"metrics[{index}].id", f"duplicate metric id '{metric.id}'")
        seen.add(metric.id)
    return sorted(metrics, key=lambda metric: metric.id)


def _correct(
    counts: MetricCounts,
    budget: RiskBudget,
    policy: CorrectionPolicy,
    corr_success: CorrelationMatrix | None,
    corr_guardrail: CorrelationMatrix | None,
) -> Correction:
    if not policy.nyholt:
        return design.get(policy.kind)(counts, budget)
    if counts.S >= 2 and corr_success is None:
        raise PlanningError("Nyholt adjustment requires a success correlation matrix")
    if counts.G >= 2 and corr_guardrail is None:
        raise PlanningError("Nyholt adjustment requires a guardrail correlation matrix")
    return apply_nyholt(counts, budget, policy, corr_success, corr_guardrail)


def _planned_tests(metric: MetricSpec, correction: Correction) -> list[PlannedTest]:
    tests = []
    for kind in metric.test_kinds():
        if kind == TestKind.SUPERIORITY:
            tests.append(PlannedTest(metric.id, kind, correction.alpha_success))  # type: ignore[arg-type]
        elif kind == TestKind.NON_INFERIORITY:
            level = correction.alpha_guardrail
            tests.append(PlannedTest(metric.id, kind, level, nim=metric.nim))  # type: ignore[arg-type]
        elif correction.alpha_minus_star is not None:
            tests.append(PlannedTest(metric.id, kind, correction.alpha_minus_star))
    return tests


def _required_n(metric: MetricSpec, correction: Correction) -> int:
    sizes = [1]
    beta = correction.beta_star
    variance = float(metric.variance)  # type: ignore[arg-type]
    if metric.is_success():
        alpha = float(correction.alpha_success)  # type: ignore[arg-type]
        sizes.append(required_sample_size(variance, float(metric.mde), alpha, beta))  # type: ignore[arg-type]
    if metric.is_guardrail():
        alpha = float(correction.alpha_guardrail)  # type: ignore[arg-type]
        sizes.append(required_sample_size(variance, float(metric.nim), alpha, beta))  # type: ignore[arg-type]
    return max(sizes)


def build_design_plan(
    metrics: Iterable[MetricSpec],
    budget: RiskBudget,
    policy: CorrectionPolicy,
    corr_success: CorrelationMatrix | None = None,
    corr_guardrail: CorrelationMatrix | None = None,
) -> DesignPlan:
    """Levels, power targets and the common per-group sample size of an experiment.

    Correlation matrices are ordered like the success and guardrail metrics sorted by id.
    """
    metrics = _sorted_unique(list(metrics))
    counts = count_metrics(metrics)
    if policy.kind == CorrectionKind.PROP33 and (counts.D > 0 or counts.Q > 0):
        raise PlanningError("prop33 runs no deterioration or quality tests: D and Q must be 0")
    correction = _correct(counts, budget, policy, corr_success, corr_guardrail)
    if not 0.0 < correction.beta_star < 1.0:
        raise PlanningError(f"Corrected beta must be in (0, 1), got {correction.beta_star}")
    tests = []
    power_targets = {}
    required_n = 1
    for metric in metrics:
        tests.extend(_planned_tests(metric, correction))
        if metric.is_powered():
            power_targets[metric.id] = correction.power_target
            required_n = max(required_n, _required_n(metric, correction))
    tests.sort(key=lambda test: test.test_id)
    effective = {}
    if policy.nyholt:
        effective = effective_counts(counts, corr_success, corr_guardrail)
    plan = DesignPlan(
        policy=policy,
        budget=budget,
        counts=counts,
        correction=correction,
        tests=tests,
        power_targets=power_targets,
        required_n_per_group=required_n,
        effective_tests=effective,
    )
    logger.info("Design plan %s: %d tests, n per group %d", policy.label, len(tests), required_n)
    return plan


def achieved_power_by_metric(plan: DesignPlan, metrics: Iterable[MetricSpec]) -> dict[str, float]:
    """Power of each superiority and non-inferiority test at the plan's common sample size."""
    levels = plan.levels
    powers = {}
    for metric in sorted(metrics, key=lambda metric: metric.id):
        for kind in (TestKind.SUPERIORITY, TestKind.NON_INFERIORITY):
            test = make_test_id(metric.id, kind)
            if test not in levels:
                continue
            effect = metric.mde if kind == TestKind.SUPERIORITY else metric.nim
            n = plan.required_n_per_group
            powers[test] = achieved_power(metric.variance, effect, n, levels[test])  # type: ignore[arg-type]
    return powers

"""Ship decisions from the outcomes of an experiment's planned tests.

Decision Rule 1 ships when at least one success metric is superior and every guardrail is
non-inferior. Decision Rule 2 additionally blocks on any significant deterioration and on any
failed quality test. Without success metrics the success clause is absent and counts as passed.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field

from pyDecisionGate.design.model import DesignPlan, PlannedTest
from pyDecisionGate.errors import EvaluationError
from pyDecisionGate.hypothesis import run_external_quality, run_srm, run_test
from pyDecisionGate.model import (
    CLAUSE_ORDER,
    Clause,
    Decision,
    Direction,
    ExperimentOutcome,
    ExperimentResults,
    MetricSpec,
    OutcomeEntry,
    TestKind,
    TestOutcome,
    TestSpec,
    Verdict,
    clause_of,
)
from pyDecisionGate.numeric import std_normal_cdf
from pyDecisionGate.sequential import BoundarySchedule, evaluate_sequential

logger = logging.getLogger(__name__)


def _ids(entries: Iterable[OutcomeEntry]) -> list[str]:
    return sorted(entry.test_id for entry in entries)


def _success_clause(outcomes: ExperimentOutcome) -> tuple[bool, list[str]]:
    success = outcomes.of_kind(TestKind.SUPERIORITY)
    if len(success) == 0 or any(entry.rejected for entry in success):
        return True, []
    return False, _ids(success)


def _guardrail_clause(outcomes: ExperimentOutcome) -> tuple[bool, list[str]]:
    failing = [entry for entry in outcomes.of_kind(TestKind.NON_INFERIORITY) if not entry.rejected]
    return len(failing) == 0, _ids(failing)


def _rejected_clause(outcomes: ExperimentOutcome, *kinds: TestKind) -> tuple[bool, list[str]]:
    rejected = [entry for entry in outcomes.of_kind(*kinds) if entry.rejected]
    return len(rejected) == 0, _ids(rejected)


def _decide(rule: int, clauses: dict[Clause, tuple[bool, list[str]]]) -> Decision:
    blocking = []
    for clause in CLAUSE_ORDER:
        blocking.extend(clauses[clause][1])
    passed = all(result for result, _ in clauses.values())
    return Decision(
        verdict=Verdict.SHIP if passed else Verdict.NO_SHIP,
        rule=rule,
        any_success_superior=clauses[Clause.SUCCESS][0],
        all_guardrails_noninferior=clauses[Clause.GUARDRAIL][0],
        no_deterioration=clauses[Clause.DETERIORATION][0],
        no_quality_failure=clauses[Clause.QUALITY][0],
        blocking_tests=tuple(blocking),
    )


def _require_powered_tests(outcomes: ExperimentOutcome, rule: int) -> None:
    if outcomes.is_empty():
        raise EvaluationError("Cannot decide on an empty set of test outcomes")
    if len(outcomes.of_kind(TestKind.SUPERIORITY, TestKind.NON_INFERIORITY)) == 0:
        raise EvaluationError(f"Decision Rule {rule} needs at least one superiority or non-inferiority test")


def evaluate_rule1(outcomes: ExperimentOutcome) -> Decision:
    _require_powered_tests(outcomes, 1)
    return _decide(
        1,
        {
            Clause.SUCCESS: _success_clause(outcomes),
            Clause.GUARDRAIL: _guardrail_clause(outcomes),
            Clause.DETERIORATION: (True, []),
            Clause.QUALITY: (True, []),
        },
    )


def evaluate_rule2(outcomes: ExperimentOutcome) -> Decision:
    _require_powered_tests(outcomes, 2)
    return _decide(
        2,
        {
            Clause.SUCCESS: _success_clause(outcomes),
            Clause.GUARDRAIL: _guardrail_clause(outcomes),
            Clause.DETERIORATION: _rejected_clause(outcomes, TestKind.INFERIORITY),
            Clause.QUALITY: _rejected_clause(outcomes, TestKind.QUALITY_SRM, TestKind.QUALITY_EXTERNAL),
        },
    )


def evaluate(outcomes: ExperimentOutcome, rule: int) -> Decision:
    if rule == 1:
        return evaluate_rule1(outcomes)
    if rule == 2:
        return evaluate_rule2(outcomes)
    raise EvaluationError(f"Unknown decision rule {rule}")


@dataclass(frozen=True)
class ClauseReport:
    clause: Clause
    passed: bool
    blocking: tuple[str, ...] = ()


@dataclass(frozen=True)
class DecisionReport:
    verdict: Verdict
    rule: int
    clauses: tuple[ClauseReport, ...] = field(default_factory=tuple)

    def blocking_tests(self) -> list[str]:
        return [test for clause in self.clauses for test in clause.blocking]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "rule": self.rule,
            "clauses": [
                {"clause": report.clause.value, "passed": report.passed, "blocking": list(report.blocking)}
                for report in self.clauses
            ],
        }

    @classmethod
    def from_dict(cls, values: dict) -> "DecisionReport":
        return cls(
            verdict=Verdict(values["verdict"]),
            rule=int(values["rule"]),
            clauses=tuple(
                ClauseReport(Clause(item["clause"]), bool(item["passed"]), tuple(item["blocking"]))
                for item in values["clauses"]
            ),
        )


def explain(decision: Decision) -> DecisionReport:
    """Clauses ordered quality, deterioration, guardrail, success with their blocking tests."""
    results = decision.clause_results()
    blocking = {clause: [] for clause in CLAUSE_ORDER}
    for test in decision.blocking_tests:
        blocking[clause_of(test)].append(test)
    return DecisionReport(
        verdict=decision.verdict,
        rule=decision.rule,
        clauses=tuple(ClauseReport(clause, results[clause], tuple(blocking[clause])) for clause in CLAUSE_ORDER),
    )


def check_roster(plan: DesignPlan, outcomes: ExperimentOutcome) -> None:
    """Raises unless the outcomes hold exactly one entry per planned test."""
    observed = outcomes.test_ids()
    duplicates = sorted({test for test in observed if observed.count(test) > 1})
    missing = sorted(set(plan.test_ids()) - set(observed))
    extra = sorted(set(observed) - set(plan.test_ids()))
    problems = []
    if duplicates:
        problems.append(f"duplicated {', '.join(duplicates)}")
    if missing:
        problems.append(f"missing {', '.join(missing)}")
    if extra:
        problems.append(f"unplanned {', '.join(extra)}")
    if problems:
        raise EvaluationError(f"Outcomes do not match the design plan: {'; '.join(problems)}")


def _check_results(plan: DesignPlan, metrics: dict[str, MetricSpec], results: ExperimentResults) -> None:
    planned = {test.metric_id for test in plan.tests}
    unknown = sorted(results.metric_ids() - set(metrics))
    if unknown:
        raise EvaluationError(f"Results contain unknown metrics: {', '.join(unknown)}")
    absent = sorted(planned - results.metric_ids())
    if absent:
        raise EvaluationError(f"Results are missing planned metrics: {', '.join(absent)}")


def run_sequential_inferiority(
    z_path: list[float],
    direction: Direction,
    level: float,
    schedule: BoundarySchedule,
) -> TestOutcome:
    """Deterioration test over interim z-statistics; rejection follows the boundary crossing."""
    sign = 1.0 if direction == Direction.INCREASE_GOOD else -1.0
    path = [sign * value for value in z_path]
    if len(path) == 0:
        raise EvaluationError("A sequential deterioration test needs at least one interim statistic")
    crossing = evaluate_sequential(path, schedule)
    return TestOutcome(
        z_statistic=path[-1],
        p_value=std_normal_cdf(path[-1]),
        rejected=crossing is not None,
        significance_level=level,
    )


def _run_metric_test(
    test: PlannedTest,
    metric: MetricSpec,
    results: ExperimentResults,
    schedule: BoundarySchedule | None,
) -> TestOutcome:
    if test.kind == TestKind.QUALITY_SRM:
        if test.metric_id not in results.srm:
            raise EvaluationError(f"{test.metric_id}: sample ratio mismatch test needs group counts")
        counts = results.srm[test.metric_id]
        ratio = counts.planned_ratio if counts.planned_ratio is not None else metric.planned_ratio
        return run_srm(counts.treatment_count, counts.control_count, ratio, test.level)
    if test.kind == TestKind.QUALITY_EXTERNAL:
        if test.metric_id not in results.external_p_values:
            raise EvaluationError(f"{test.metric_id}: quality test needs a p-value")
        return run_external_quality(results.external_p_values[test.metric_id], test.level)
    if test.kind == TestKind.INFERIORITY and schedule is not None and test.metric_id in results.z_paths:
        return run_sequential_inferiority(results.z_paths[test.metric_id], metric.direction, test.level, schedule)
    if test.metric_id not in results.readouts:
        raise EvaluationError(f"{test.metric_id}: metric test needs an estimate and standard error")
    readout = results.readouts[test.metric_id].normalized(metric.direction)
    return run_test(readout, TestSpec(test.kind, test.level, test.nim))


def run_planned_tests(
    plan: DesignPlan,
    metrics: Iterable[MetricSpec],
    results: ExperimentResults,
    schedule: BoundarySchedule | None = None,
) -> ExperimentOutcome:
    """Runs every planned test on the results, normalizing decrease-is-good metrics first.

    With a boundary schedule, deterioration tests of metrics reporting a z_path are evaluated
    sequentially; all others use the fixed-horizon inferiority test.
    """
    by_id = {metric.id: metric for metric in metrics}
    _check_results(plan, by_id, results)
    entries = []
    for test in plan.tests:
        outcome = _run_metric_test(test, by_id[test.metric_id], results, schedule)
        entries.append(OutcomeEntry(test.metric_id, test.kind, outcome))
    return ExperimentOutcome(entries)


def evaluate_experiment(
    plan: DesignPlan,
    metrics: Iterable[MetricSpec],
    results: ExperimentResults,
    schedule: BoundarySchedule | None = None,
) -> tuple[Decision, ExperimentOutcome]:
    outcomes = run_planned_tests(plan, metrics, results, schedule)
    check_roster(plan, outcomes)
    decision = evaluate(outcomes, plan.rule)
    logger.info("Decision Rule %d verdict: %s", decision.rule, decision.verdict.value)
    return decision, outcomes

from dataclasses import dataclass, field
from pathlib import Path

from pyDecisionGate import factory
from pyDecisionGate.design.model import CorrectionKind, CorrectionPolicy, DesignPlan, RiskBudget
from pyDecisionGate.design.plan import build_design_plan
from pyDecisionGate.errors import ConfigurationError, DomainError
from pyDecisionGate.factory import schema
from pyDecisionGate.model import Direction, MetricSpec, QualityKind, Role
from pyDecisionGate.numeric import CorrelationMatrix
from pyDecisionGate.sequential import (
    DEFAULT_RHO,
    BoundarySchedule,
    SpendingKind,
    SpendingPlan,
    compute_boundaries,
)


@dataclass
class SequentialSettings:
    k_looks: int = 1
    spending: SpendingKind = SpendingKind.OBRIEN_FLEMING
    rho: float = DEFAULT_RHO


@dataclass
class ExperimentConfig:
    metrics: list[MetricSpec]
    budget: RiskBudget
    policy: CorrectionPolicy
    sequential: SequentialSettings = field(default_factory=SequentialSettings)
    corr_success: CorrelationMatrix | None = None
    corr_guardrail: CorrelationMatrix | None = None

    def design_plan(self) -> DesignPlan:
        return build_design_plan(
            self.metrics,
            self.budget,
            self.policy,
            corr_success=self.corr_success,
            corr_guardrail=self.corr_guardrail,
        )

    def srm_metric_id(self) -> str | None:
        for metric in self.metrics:
            if metric.is_quality() and metric.quality_kind == QualityKind.SRM:
                return metric.id
        return None

    def boundary_schedule(self, plan: DesignPlan) -> BoundarySchedule | None:
        """Deterioration boundaries when the experiment is analysed more than once."""
        alpha = plan.correction.alpha_minus_star
        if alpha is None or self.sequential.k_looks <= 1:
            return None
        spending = SpendingPlan(
            total_alpha=alpha,
            k_analyses=self.sequential.k_looks,
            spending_kind=self.sequential.spending,
            rho=self.sequential.rho,
        )
        return compute_boundaries(spending)


def _roles(values: dict, path: str) -> frozenset[Role]:
    raw = schema.array(values, "roles", path, required=True)
    roles = set()
    for index, role in enumerate(raw):
        role_path = f"{schema.join(path, 'roles')}[{index}]"
        try:
            roles.add(Role(role))
        except ValueError as exc:
            allowed = "|".join(member.value for member in Role)
            raise ConfigurationError(role_path, f"expected one of {allowed}, got {role!r}") from exc
    if len(roles) == 0:
        raise ConfigurationError(schema.join(path, "roles"), "a metric needs at least one role")
    return frozenset(roles)


def parse_metric(values: dict, path: str) -> MetricSpec:
    values = schema.table(values, path)
    metric_id = schema.text(values, "id", path)
    try:
        return MetricSpec(
            id=metric_id,
            roles=_roles(values, path),
            variance=schema.optional_number(values, "variance", path),
            mde=schema.optional_number(values, "mde", path),
            nim=schema.optional_number(values, "nim", path),
            direction=schema.choice(values, "direction", path, Direction, Direction.INCREASE_GOOD),
            deterioration=schema.boolean(values, "deterioration", path, True),
            quality_kind=schema.choice(values, "quality_kind", path, QualityKind, QualityKind.EXTERNAL),
            planned_ratio=schema.number(values, "planned_ratio", path, 1.0),
        )
    except ConfigurationError as exc:
        if exc.field_path.startswith(f"{metric_id}."):
            raise ConfigurationError(f"{path}{exc.field_path[len(metric_id):]}", exc.message) from exc
        raise


def parse_metrics(values: dict) -> list[MetricSpec]:
    raw = schema.array(values, "metrics", required=True)
    if len(raw) == 0:
        raise ConfigurationError("metrics", "at least one metric is required")
    metrics = []
    seen = set()
    for index, item in enumerate(raw):
        path = f"metrics[{index}]"
        metric = parse_metric(item, path)
        if metric.id in seen:
            raise ConfigurationError(f"{path}.id", f"duplicate metric id '{metric.id}'")
        seen.add(metric.id)
        metrics.append(metric)
    return metrics


def parse_budget(values: dict) -> RiskBudget:
    budget = schema.section(values, "budget")
    alpha = schema.probability(budget, "alpha", "budget", 0.05)
    return RiskBudget(
        alpha=alpha,
        alpha_minus=schema.probability(budget, "alpha_minus", "budget", alpha, allow_zero=True),
        beta=schema.probability(budget, "beta", "budget", 0.2),
    )


def parse_policy(values: dict) -> CorrectionPolicy:
    policy = schema.section(values, "policy")
    return CorrectionPolicy(
        kind=schema.choice(policy, "correction", "policy", CorrectionKind, CorrectionKind.PROP41),
        nyholt=schema.boolean(policy, "nyholt", "policy", False),
        nyholt_deterioration=schema.boolean(policy, "nyholt_deterioration", "policy", False),
    )


def parse_sequential(values: dict) -> SequentialSettings:
    sequential = schema.section(values, "sequential")
    k_looks = schema.integer(sequential, "k_looks", "sequential", 1)
    if k_looks < 1:
        raise ConfigurationError("sequential.k_looks", f"must be at least 1, got {k_looks}")
    rho = schema.number(sequential, "rho", "sequential", DEFAULT_RHO)
    if rho <= 0.0:
        raise ConfigurationError("sequential.rho", f"must be positive, got {rho}")
    return SequentialSettings(
        k_looks=k_looks,
        spending=schema.choice(sequential, "spending", "sequential", SpendingKind, SpendingKind.OBRIEN_FLEMING),
        rho=rho,
    )


def _correlation(values: dict, key: str) -> CorrelationMatrix | None:
    rows = schema.matrix(values, key, "correlations")
    if rows is None:
        return None
    try:
        return CorrelationMatrix(rows)  # type: ignore[arg-type]
    except DomainError as exc:
        raise ConfigurationError(f"correlations.{key}", str(exc)) from exc


def parse_config(values: dict) -> ExperimentConfig:
    values = schema.table(values, "config")
    correlations = schema.section(values, "correlations")
    return ExperimentConfig(
        metrics=parse_metrics(values),
        budget=parse_budget(values),
        policy=parse_policy(values),
        sequential=parse_sequential(values),
        corr_success=_correlation(correlations, "success"),
        corr_guardrail=_correlation(correlations, "guardrail"),
    )


def read_config(path: Path) -> ExperimentConfig:
    return parse_config(factory.read(path))

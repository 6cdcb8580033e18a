from dataclasses import dataclass, field
from enum import StrEnum

from pyDecisionGate.errors import DomainError, PlanningError
from pyDecisionGate.model import TestKind, make_test_id


class CorrectionKind(StrEnum):
    NONE = "none"
    ONLY_ALPHA = "only_alpha"
    PROP33 = "prop33"
    PROP41 = "prop41"
    PROP41_IMPROVED = "prop41_improved"
    PROP41_IMPROVED_REMARK = "prop41_improved_remark"
    PROP41_GUARDRAIL = "prop41_guardrail"

    def decision_rule(self) -> int:
        return 1 if self == CorrectionKind.PROP33 else 2


@dataclass(frozen=True)
class MetricCounts:
    S: int = 0
    G: int = 0
    D: int = 0
    Q: int = 0

    def __post_init__(self):
        if min(self.S, self.G, self.D, self.Q) < 0:
            raise DomainError(f"Metric counts must be non-negative: {self}")
        if self.total < 1:
            raise PlanningError("At least one metric or quality test is required")

    @property
    def total(self) -> int:
        return self.S + self.G + self.D + self.Q

    def has_powered_metrics(self) -> bool:
        return self.S + self.G >= 1


@dataclass(frozen=True)
class RiskBudget:
    alpha: float = 0.05
    alpha_minus: float = 0.05
    beta: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise PlanningError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise PlanningError(f"beta must be in (0, 1), got {self.beta}")
        if not 0.0 <= self.alpha_minus < 1.0:
            raise PlanningError(f"alpha_minus must be in [0, 1), got {self.alpha_minus}")


@dataclass(frozen=True)
class CorrectionPolicy:
    kind: CorrectionKind = CorrectionKind.PROP41
    nyholt: bool = False
    nyholt_deterioration: bool = False

    @property
    def label(self) -> str:
        if self.nyholt:
            return f"{self.kind.value}+nyholt"
        return self.kind.value


@dataclass(frozen=True)
class Correction:
    """Per-test levels and the power target of one correction.

    alpha_success is None without success metrics, alpha_guardrail is None without
    guardrails and alpha_minus_star is None for corrections that run no deterioration tests.
    """

    alpha_success: float | None
    alpha_guardrail: float | None
    alpha_minus_star: float | None
    beta_star: float

    @property
    def power_target(self) -> float:
        return 1.0 - self.beta_star


@dataclass(frozen=True)
class PlannedTest:
    metric_id: str
    kind: TestKind
    level: float
    nim: float | None = None

    @property
    def test_id(self) -> str:
        return make_test_id(self.metric_id, self.kind)


@dataclass
class DesignPlan:
    policy: CorrectionPolicy
    budget: RiskBudget
    counts: MetricCounts
    correction: Correction
    tests: list[PlannedTest]
    power_targets: dict[str, float]
    required_n_per_group: int
    effective_tests: dict[str, float] = field(default_factory=dict)

    @property
    def rule(self) -> int:
        return self.policy.kind.decision_rule()

    @property
    def levels(self) -> dict[str, float]:
        return {test.test_id: test.level for test in self.tests}

    def test_ids(self) -> list[str]:
        return [test.test_id for test in self.tests]

    def to_dict(self) -> dict:
        return {
            "policy": {
                "correction": self.policy.kind.value,
                "nyholt": self.policy.nyholt,
                "nyholt_deterioration": self.policy.nyholt_deterioration,
            },
            "rule": self.rule,
            "budget": {
                "alpha": self.budget.alpha,
                "alpha_minus": self.budget.alpha_minus,
                "beta": self.budget.beta,
            },
            "counts": {"S": self.counts.S, "G": self.counts.G, "D": self.counts.D, "Q": self.counts.Q},
            "correction": {
                "alpha_success": self.correction.alpha_success,
                "alpha_guardrail": self.correction.alpha_guardrail,
                "alpha_minus_star": self.correction.alpha_minus_star,
                "beta_star": self.correction.beta_star,
            },
            "tests": [
                {
                    "id": test.test_id,
                    "metric": test.metric_id,
                    "kind": test.kind.value,
                    "level": test.level,
                    "nim": test.nim,
                }
                for test in self.tests
            ],
            "power_targets": dict(self.power_targets),
            "required_n_per_group": self.required_n_per_group,
            "effective_tests": dict(self.effective_tests),
        }

    @classmethod
    def from_dict(cls, values: dict) -> "DesignPlan":
        policy = values["policy"]
        return cls(
            policy=CorrectionPolicy(
                kind=CorrectionKind(policy["correction"]),
                nyholt=bool(policy["nyholt"]),
                nyholt_deterioration=bool(policy.get("nyholt_deterioration", False)),
            ),
            budget=RiskBudget(**values["budget"]),
            counts=MetricCounts(**values["counts"]),
            correction=Correction(**values["correction"]),
            tests=[
                PlannedTest(metric_id=test["metric"], kind=TestKind(test["kind"]), level=test["level"], nim=test["nim"])
                for test in values["tests"]
            ],
            power_targets=dict(values["power_targets"]),
            required_n_per_group=int(values["required_n_per_group"]),
            effective_tests=dict(values.get("effective_tests", {})),
        )

import math
from dataclasses import dataclass, field
from enum import StrEnum

from pyDecisionGate.errors import ConfigurationError, DomainError


class Role(StrEnum):
    SUCCESS = "success"
    GUARDRAIL = "guardrail"
    DETERIORATION = "deterioration"
    QUALITY = "quality"


class Direction(StrEnum):
    INCREASE_GOOD = "increase_good"
    DECREASE_GOOD = "decrease_good"


class QualityKind(StrEnum):
    SRM = "srm"
    EXTERNAL = "external"


class TestKind(StrEnum):
    SUPERIORITY = "superiority"
    NON_INFERIORITY = "non_inferiority"
    INFERIORITY = "inferiority"
    QUALITY_SRM = "quality_srm"
    QUALITY_EXTERNAL = "quality_external"

    __test__ = False

    def is_quality(self) -> bool:
        return self in (TestKind.QUALITY_SRM, TestKind.QUALITY_EXTERNAL)


def make_test_id(metric_id: str, kind: TestKind) -> str:
    if kind.is_quality():
        return metric_id
    return f"{metric_id}:{kind.value}"


def _positive(value: float | None, field_path: str) -> float | None:
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ConfigurationError(field_path, f"must be a positive number, got {value}")
    return value


@dataclass
class MetricSpec:
    id: str
    roles: frozenset[Role]
    variance: float | None = None
    mde: float | None = None
    nim: float | None = None
    direction: Direction = Direction.INCREASE_GOOD
    deterioration: bool = True
    quality_kind: QualityKind = QualityKind.EXTERNAL
    planned_ratio: float = 1.0

    def __post_init__(self):
        self.roles = frozenset(Role(role) for role in self.roles)
        self.direction = Direction(self.direction)
        self.quality_kind = QualityKind(self.quality_kind)
        if len(self.id.strip()) == 0:
            raise ConfigurationError("id", "metric id must not be blank")
        if len(self.roles) == 0:
            raise ConfigurationError(f"{self.id}.roles", "a metric needs at least one role")
        self.variance = _positive(self.variance, f"{self.id}.variance")
        self.mde = _positive(self.mde, f"{self.id}.mde")
        self.nim = _positive(self.nim, f"{self.id}.nim")
        self.planned_ratio = float(_positive(self.planned_ratio, f"{self.id}.planned_ratio") or 1.0)
        if self.is_success() and self.mde is None:
            raise ConfigurationError(f"{self.id}.mde", "success metrics require an MDE")
        if self.is_guardrail() and self.nim is None:
            raise ConfigurationError(f"{self.id}.nim", "guardrail metrics require a NIM")
        if self.needs_variance() and self.variance is None:
            raise ConfigurationError(f"{self.id}.variance", "metric tests require a variance")

    def is_success(self) -> bool:
        return Role.SUCCESS in self.roles

    def is_guardrail(self) -> bool:
        return Role.GUARDRAIL in self.roles

    def is_quality(self) -> bool:
        return Role.QUALITY in self.roles

    def is_powered(self) -> bool:
        return self.is_success() or self.is_guardrail()

    def is_extra_deterioration(self) -> bool:
        return Role.DETERIORATION in self.roles and not self.is_powered()

    def has_deterioration_test(self) -> bool:
        if self.is_extra_deterioration():
            return True
        return self.is_powered() and (self.deterioration or Role.DETERIORATION in self.roles)

    def needs_variance(self) -> bool:
        return self.is_powered() or Role.DETERIORATION in self.roles

    def quality_test_kind(self) -> TestKind:
        if self.quality_kind == QualityKind.SRM:
            return TestKind.QUALITY_SRM
        return TestKind.QUALITY_EXTERNAL

    def test_kinds(self) -> list[TestKind]:
        kinds = []
        if self.is_success():
            kinds.append(TestKind.SUPERIORITY)
        if self.is_guardrail():
            kinds.append(TestKind.NON_INFERIORITY)
        if self.has_deterioration_test():
            kinds.append(TestKind.INFERIORITY)
        if self.is_quality():
            kinds.append(self.quality_test_kind())
        return kinds


@dataclass(frozen=True)
class TestSpec:
    kind: TestKind
    significance_level: float
    nim: float | None = None

    __test__ = False

    def __post_init__(self):
        if not 0.0 < self.significance_level < 1.0:
            raise DomainError(f"Significance level must be in (0, 1), got {self.significance_level}")
        if self.kind == TestKind.NON_INFERIORITY:
            if self.nim is None:
                raise ConfigurationError("nim", "non-inferiority tests require a NIM")
            if self.nim <= 0:
                raise DomainError(f"NIM must be positive, got {self.nim}")
        elif self.nim is not None:
            raise DomainError(f"NIM is only used by non-inferiority tests, not {self.kind}")


@dataclass(frozen=True)
class MetricReadout:
    estimate: float
    std_error: float
    n_treatment: int = 1
    n_control: int = 1

    def __post_init__(self):
        if not math.isfinite(self.estimate):
            raise DomainError(f"Estimate must be finite, got {self.estimate}")
        if not math.isfinite(self.std_error) or self.std_error <= 0:
            raise DomainError(f"Standard error must be positive, got {self.std_error}")
        if self.n_treatment < 1 or self.n_control < 1:
            raise DomainError("Sample sizes must be at least 1")

    def normalized(self, direction: Direction) -> "MetricReadout":
        """Readout with increase meaning improvement."""
        if direction == Direction.INCREASE_GOOD:
            return self
        return MetricReadout(-self.estimate, self.std_error, self.n_treatment, self.n_control)


@dataclass(frozen=True)
class TestOutcome:
    z_statistic: float
    p_value: float
    rejected: bool
    significance_level: float
    ci_lower: float | None = None
    ci_upper: float | None = None

    __test__ = False


@dataclass(frozen=True)
class OutcomeEntry:
    metric_id: str
    kind: TestKind
    outcome: TestOutcome

    @property
    def test_id(self) -> str:
        return make_test_id(self.metric_id, self.kind)

    @property
    def rejected(self) -> bool:
        return self.outcome.rejected


@dataclass
class ExperimentOutcome:
    entries: list[OutcomeEntry] = field(default_factory=list)

    def of_kind(self, *kinds: TestKind) -> list[OutcomeEntry]:
        return [entry for entry in self.entries if entry.kind in kinds]

    def test_ids(self) -> list[str]:
        return [entry.test_id for entry in self.entries]

    def is_empty(self) -> bool:
        return len(self.entries) == 0


class Verdict(StrEnum):
    SHIP = "ship"
    NO_SHIP = "no_ship"


class Clause(StrEnum):
    QUALITY = "no_quality_failure"
    DETERIORATION = "no_deterioration"
    GUARDRAIL = "all_guardrails_noninferior"
    SUCCESS = "any_success_superior"


CLAUSE_ORDER = [Clause.QUALITY, Clause.DETERIORATION, Clause.GUARDRAIL, Clause.SUCCESS]

CLAUSE_OF_KIND = {
    TestKind.QUALITY_SRM: Clause.QUALITY,
    TestKind.QUALITY_EXTERNAL: Clause.QUALITY,
    TestKind.INFERIORITY: Clause.DETERIORATION,
    TestKind.NON_INFERIORITY: Clause.GUARDRAIL,
    TestKind.SUPERIORITY: Clause.SUCCESS,
}


def clause_of(identifier: str) -> Clause:
    _, _, kind = identifier.rpartition(":")
    if kind in {member.value for member in TestKind}:
        return CLAUSE_OF_KIND[TestKind(kind)]
    return Clause.QUALITY


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    rule: int
    any_success_superior: bool
    all_guardrails_noninferior: bool
    no_deterioration: bool
    no_quality_failure: bool
    blocking_tests: tuple[str, ...] = ()

    def is_ship(self) -> bool:
        return self.verdict == Verdict.SHIP

    def clause_results(self) -> dict[Clause, bool]:
        return {
            Clause.SUCCESS: self.any_success_superior,
            Clause.GUARDRAIL: self.all_guardrails_noninferior,
            Clause.DETERIORATION: self.no_deterioration,
            Clause.QUALITY: self.no_quality_failure,
        }

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "rule": self.rule,
            "any_success_superior": self.any_success_superior,
            "all_guardrails_noninferior": self.all_guardrails_noninferior,
            "no_deterioration": self.no_deterioration,
            "no_quality_failure": self.no_quality_failure,
            "blocking_tests": list(self.blocking_tests),
        }

    @classmethod
    def from_dict(cls, values: dict) -> "Decision":
        return cls(
            verdict=Verdict(values["verdict"]),
            rule=int(values["rule"]),
            any_success_superior=bool(values["any_success_superior"]),
            all_guardrails_noninferior=bool(values["all_guardrails_noninferior"]),
            no_deterioration=bool(values["no_deterioration"]),
            no_quality_failure=bool(values["no_quality_failure"]),
            blocking_tests=tuple(values["blocking_tests"]),
        )


@dataclass(frozen=True)
class SrmCounts:
    treatment_count: int
    control_count: int
    planned_ratio: float | None = None


@dataclass
class ExperimentResults:
    """Observed data of one experiment, keyed by metric id."""

    readouts: dict[str, MetricReadout] = field(default_factory=dict)
    srm: dict[str, SrmCounts] = field(default_factory=dict)
    external_p_values: dict[str, float] = field(default_factory=dict)
    z_paths: dict[str, list[float]] = field(default_factory=dict)

    def metric_ids(self) -> set[str]:
        return set(self.readouts) | set(self.srm) | set(self.external_p_values)

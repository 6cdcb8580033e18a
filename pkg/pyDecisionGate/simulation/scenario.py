import os
from dataclasses import dataclass, field
from enum import StrEnum

from pyDecisionGate import design
from pyDecisionGate.design.model import Correction, CorrectionKind, CorrectionPolicy, MetricCounts, RiskBudget
from pyDecisionGate.design.nyholt import apply_nyholt
from pyDecisionGate.errors import DomainError
from pyDecisionGate.numeric import CorrelationMatrix

SEED_VARIABLE = "DECISION_GATE_SEED"
DEFAULT_SEED = 20240101
DEFAULT_REPLICATIONS = 20_000
FULL_REPLICATIONS = 100_000
STRONG_CORRELATION = 0.99


def default_seed() -> int:
    value = os.environ.get(SEED_VARIABLE)
    if value is None or len(value.strip()) == 0:
        return DEFAULT_SEED
    try:
        return int(value)
    except ValueError as exc:
        raise DomainError(f"{SEED_VARIABLE} must be an integer, got '{value}'") from exc


class Scenario(StrEnum):
    GLOBAL_H0 = "global_h0"
    STATUS_QUO = "status_quo"
    GLOBAL_H1 = "global_h1"


class CovarianceStructure(StrEnum):
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    BLOCK1 = "block1"
    BLOCK2 = "block2"
    PERFECTLY_CORRELATED = "perfectly_correlated"
    EXPLICIT = "explicit"


def _block(dim: int, rho: float) -> CorrelationMatrix | None:
    if dim == 0:
        return None
    if rho == 0.0:
        return CorrelationMatrix.identity(dim)
    return CorrelationMatrix.equicorrelated(dim, rho)


def build_correlation(structure: CovarianceStructure | str, S: int, G: int) -> CorrelationMatrix:
    """Correlation of the success metrics followed by the guardrails."""
    structure = CovarianceStructure(structure)
    if S + G == 0:
        raise DomainError("At least one success or guardrail metric is required")
    if structure == CovarianceStructure.INDEPENDENT:
        return CorrelationMatrix.identity(S + G)
    if structure == CovarianceStructure.DEPENDENT:
        return _block(S + G, STRONG_CORRELATION)  # type: ignore[return-value]
    if structure == CovarianceStructure.PERFECTLY_CORRELATED:
        return _block(S + G, 1.0)  # type: ignore[return-value]
    if structure == CovarianceStructure.BLOCK1:
        blocks = [_block(S, STRONG_CORRELATION), _block(G, 0.0)]
    elif structure == CovarianceStructure.BLOCK2:
        blocks = [_block(S, 0.0), _block(G, STRONG_CORRELATION)]
    else:
        raise DomainError("An explicit structure needs a correlation matrix")
    return CorrelationMatrix.block_diagonal(*[block for block in blocks if block is not None])


@dataclass
class SimulationConfig:
    counts: MetricCounts = field(default_factory=lambda: MetricCounts(S=5, G=5, D=2, Q=2))
    budget: RiskBudget = field(default_factory=RiskBudget)
    policy: CorrectionPolicy = field(default_factory=CorrectionPolicy)
    scenario: Scenario = Scenario.STATUS_QUO
    structure: CovarianceStructure = CovarianceStructure.INDEPENDENT
    correlation: CorrelationMatrix | None = None
    replications: int = DEFAULT_REPLICATIONS
    k_looks: int = 10
    seed: int = field(default_factory=default_seed)
    rule: int | None = None
    cell_id: int = 0
    chunk_size: int = 5_000

    def __post_init__(self):
        self.scenario = Scenario(self.scenario)
        self.structure = CovarianceStructure(self.structure)
        if self.replications < 1:
            raise DomainError(f"Replications must be at least 1, got {self.replications}")
        if self.k_looks < 1:
            raise DomainError(f"At least one look is required, got {self.k_looks}")
        if self.chunk_size < 1:
            raise DomainError(f"Chunk size must be at least 1, got {self.chunk_size}")
        if self.rule not in (None, 1, 2):
            raise DomainError(f"Unknown decision rule {self.rule}")
        if not self.counts.has_powered_metrics():
            raise DomainError("Simulations need at least one success or guardrail metric")
        if self.correlation is not None:
            self.structure = CovarianceStructure.EXPLICIT
            if self.correlation.dim != self.counts.S + self.counts.G:
                raise DomainError(
                    f"Correlation matrix has dimension {self.correlation.dim}, expected {self.counts.S + self.counts.G}"
                )
        elif self.structure == CovarianceStructure.EXPLICIT:
            raise DomainError("An explicit structure needs a correlation matrix")

    @property
    def decision_rule(self) -> int:
        if self.rule is not None:
            return self.rule
        return self.policy.kind.decision_rule()

    def powered_correlation(self) -> CorrelationMatrix:
        if self.correlation is not None:
            return self.correlation
        return build_correlation(self.structure, self.counts.S, self.counts.G)

    def correction(self) -> Correction:
        if not self.policy.nyholt:
            return design.get(self.policy.kind)(self.counts, self.budget)
        corr = self.powered_correlation()
        S, G = self.counts.S, self.counts.G
        corr_success = corr.sub_matrix(list(range(S))) if S > 0 else None
        corr_guardrail = corr.sub_matrix(list(range(S, S + G))) if G > 0 else None
        return apply_nyholt(self.counts, self.budget, self.policy, corr_success, corr_guardrail)

    def label(self) -> dict[str, str]:
        return {
            "scenario": self.scenario.value,
            "structure": self.structure.value,
            "correction": self.policy.label,
        }


def study_grid(
    scenarios: list[Scenario] | None = None,
    structures: list[CovarianceStructure] | None = None,
    corrections: list[CorrectionKind] | None = None,
    nyholt: bool = False,
    **overrides,
) -> list[SimulationConfig]:
    """Scenario x structure x correction cross product with the default study design."""
    scenarios = scenarios or list(Scenario)
    structures = structures or [
        CovarianceStructure.INDEPENDENT,
        CovarianceStructure.DEPENDENT,
        CovarianceStructure.BLOCK1,
        CovarianceStructure.BLOCK2,
    ]
    corrections = corrections or [CorrectionKind.NONE, CorrectionKind.ONLY_ALPHA, CorrectionKind.PROP41]
    policies = [CorrectionPolicy(kind=kind) for kind in corrections]
    if nyholt:
        policies.append(CorrectionPolicy(kind=CorrectionKind.PROP41, nyholt=True, nyholt_deterioration=True))
    grid = []
    for scenario in scenarios:
        for structure in structures:
            for policy in policies:
                grid.append(
                    SimulationConfig(scenario=scenario, structure=structure, policy=policy, **overrides)
                )
    return grid

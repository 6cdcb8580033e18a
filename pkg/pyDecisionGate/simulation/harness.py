"""Monte Carlo estimation of decision error rates at the level of standardized statistics.

Each metric follows one Brownian path sampled at K equally spaced looks. Superiority and
non-inferiority tests use the final look only, deterioration and quality tests run the
group-sequential boundary over all looks of the same path.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.linalg

from pyDecisionGate.design.model import Correction
from pyDecisionGate.errors import DomainError
from pyDecisionGate.numeric import RandomStream, cholesky_lower, upper_critical
from pyDecisionGate.sequential import (
    DEFAULT_RHO,
    BoundarySchedule,
    SpendingKind,
    SpendingPlan,
    compute_boundaries,
    crossed,
)
from pyDecisionGate.simulation.scenario import Scenario, SimulationConfig

logger = logging.getLogger(__name__)

CHUNK_BITS = 32


@lru_cache(maxsize=64)
def boundary_schedule(
    alpha: float,
    k_looks: int,
    spending_kind: SpendingKind = SpendingKind.OBRIEN_FLEMING,
    rho: float = DEFAULT_RHO,
) -> BoundarySchedule:
    return compute_boundaries(SpendingPlan.equally_spaced(alpha, k_looks, spending_kind, rho))


@dataclass(frozen=True)
class RejectionCounts:
    replications: int = 0
    success_any: int = 0
    guardrail_all: int = 0
    deterioration_powered: int = 0
    deterioration_extra: int = 0
    decision: int = 0

    def __add__(self, other: "RejectionCounts") -> "RejectionCounts":
        return RejectionCounts(
            replications=self.replications + other.replications,
            success_any=self.success_any + other.success_any,
            guardrail_all=self.guardrail_all + other.guardrail_all,
            deterioration_powered=self.deterioration_powered + other.deterioration_powered,
            deterioration_extra=self.deterioration_extra + other.deterioration_extra,
            decision=self.decision + other.decision,
        )


def standard_error(rate: float, replications: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / replications)


@dataclass(frozen=True)
class RejectionReport:
    scenario: str
    structure: str
    correction: str
    replications: int
    R_S: float
    R_G: float
    R_DSDG: float
    R_DQ: float
    decision_rate: float
    rule: int = 2

    @classmethod
    def from_counts(cls, config: SimulationConfig, counts: RejectionCounts) -> "RejectionReport":
        total = counts.replications
        return cls(
            **config.label(),
            replications=total,
            R_S=counts.success_any / total,
            R_G=counts.guardrail_all / total,
            R_DSDG=counts.deterioration_powered / total,
            R_DQ=counts.deterioration_extra / total,
            decision_rate=counts.decision / total,
            rule=config.decision_rule,
        )

    def rates(self) -> dict[str, float]:
        return {
            "R_S": self.R_S,
            "R_G": self.R_G,
            "R_DSDG": self.R_DSDG,
            "R_DQ": self.R_DQ,
            "decision_rate": self.decision_rate,
        }

    def standard_errors(self) -> dict[str, float]:
        return {name: standard_error(rate, self.replications) for name, rate in self.rates().items()}

    @property
    def se_decision(self) -> float:
        return standard_error(self.decision_rate, self.replications)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "structure": self.structure,
            "correction": self.correction,
            "rule": self.rule,
            "replications": self.replications,
            "rates": self.rates(),
            "standard_errors": self.standard_errors(),
        }


@dataclass
class CellModel:
    """Everything a chunk of replications needs, derived once per simulation cell."""

    chol: np.ndarray
    drift: np.ndarray
    fractions: np.ndarray
    success: np.ndarray
    guardrail: np.ndarray
    extra: np.ndarray
    success_critical: float
    guardrail_critical: float
    nim_shift: float
    schedule: BoundarySchedule | None
    rule: int
    steps: np.ndarray = field(init=False)

    def __post_init__(self):
        self.steps = np.sqrt(np.diff(np.concatenate(([0.0], self.fractions))))

    @property
    def dim(self) -> int:
        return self.chol.shape[0]


def _success_drift(config: SimulationConfig, correction: Correction) -> float:
    if config.scenario != Scenario.GLOBAL_H1 or correction.alpha_success is None:
        return 0.0
    return upper_critical(correction.alpha_success) + upper_critical(correction.beta_star)


def build_cell_model(config: SimulationConfig) -> CellModel:
    correction = config.correction()
    S, G, D, Q = config.counts.S, config.counts.G, config.counts.D, config.counts.Q
    blocks = [cholesky_lower(config.powered_correlation())]
    if D + Q > 0:
        blocks.append(np.eye(D + Q))
    chol = scipy.linalg.block_diag(*blocks)

    nim_shift = 0.0
    guardrail_critical = math.inf
    if correction.alpha_guardrail is not None:
        guardrail_critical = upper_critical(correction.alpha_guardrail)
        nim_shift = guardrail_critical + upper_critical(correction.beta_star)
    drift = np.zeros(S + G + D + Q)
    drift[:S] = _success_drift(config, correction)
    if config.scenario == Scenario.GLOBAL_H0:
        drift[S : S + G] = -nim_shift

    schedule = None
    if correction.alpha_minus_star is not None:
        schedule = boundary_schedule(correction.alpha_minus_star, config.k_looks)
    success_critical = math.inf
    if correction.alpha_success is not None:
        success_critical = upper_critical(correction.alpha_success)
    return CellModel(
        chol=chol,
        drift=drift,
        fractions=np.arange(1, config.k_looks + 1) / config.k_looks,
        success=np.arange(S),
        guardrail=np.arange(S, S + G),
        extra=np.arange(S + G, S + G + D + Q),
        success_critical=success_critical,
        guardrail_critical=guardrail_critical,
        nim_shift=nim_shift,
        schedule=schedule,
        rule=config.decision_rule,
    )


def simulate_paths(model: CellModel, stream: RandomStream, size: int) -> np.ndarray:
    """Standardized statistics of shape (size, K, M)."""
    normals = stream.standard_normal((size, model.fractions.shape[0], model.dim))
    increments = (normals @ model.chol.T) * model.steps[None, :, None]
    roots = np.sqrt(model.fractions)[None, :, None]
    return np.cumsum(increments, axis=1) / roots + model.drift[None, None, :] * roots


def _any_crossed(paths: np.ndarray, schedule: BoundarySchedule | None, columns: np.ndarray) -> np.ndarray:
    if schedule is None or columns.shape[0] == 0:
        return np.zeros(paths.shape[0], dtype=bool)
    return np.any(crossed(paths[:, :, columns], schedule, axis=1), axis=-1)


def simulate_chunk(model: CellModel, stream: RandomStream, size: int) -> RejectionCounts:
    paths = simulate_paths(model, stream, size)
    final = paths[:, -1, :]
    superior = final[:, model.success] > model.success_critical
    noninferior = final[:, model.guardrail] + model.nim_shift > model.guardrail_critical
    success_any = np.any(superior, axis=1)
    success_clause = success_any if model.success.shape[0] > 0 else np.ones(size, dtype=bool)
    guardrail_all = np.all(noninferior, axis=1)
    powered = np.concatenate((model.success, model.guardrail))
    deterioration_powered = _any_crossed(paths, model.schedule, powered)
    deterioration_extra = _any_crossed(paths, model.schedule, model.extra)
    decision = success_clause & guardrail_all
    if model.rule == 2:
        decision &= ~deterioration_powered & ~deterioration_extra
    return RejectionCounts(
        replications=size,
        success_any=int(np.sum(success_any)),
        guardrail_all=int(np.sum(guardrail_all)),
        deterioration_powered=int(np.sum(deterioration_powered)),
        deterioration_extra=int(np.sum(deterioration_extra)),
        decision=int(np.sum(decision)),
    )


def chunk_sizes(replications: int, chunk_size: int) -> list[int]:
    full, rest = divmod(replications, chunk_size)
    return [chunk_size] * full + ([rest] if rest > 0 else [])


def chunk_stream(seed: int, cell_id: int, chunk_id: int) -> RandomStream:
    return RandomStream(seed=seed, substream_id=(cell_id << CHUNK_BITS) | chunk_id)


def run_simulation(config: SimulationConfig, threads: int = 1) -> RejectionReport:
    """Rates of one cell; identical for every thread count given the seed."""
    model = build_cell_model(config)
    sizes = chunk_sizes(config.replications, config.chunk_size)
    logger.info(
        "Simulating %s/%s/%s with %d replications",
        config.scenario.value,
        config.structure.value,
        config.policy.label,
        config.replications,
    )

    def run(chunk_id: int) -> RejectionCounts:
        stream = chunk_stream(config.seed, config.cell_id, chunk_id)
        return simulate_chunk(model, stream, sizes[chunk_id])

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(run, range(len(sizes))))
    else:
        parts = [run(chunk_id) for chunk_id in range(len(sizes))]
    total = RejectionCounts()
    for part in parts:
        total = total + part
    report = RejectionReport.from_counts(config, total)
    logger.debug("Decision rate %.6f (se %.6f)", report.decision_rate, report.se_decision)
    return report


def run_table(configs: list[SimulationConfig], threads: int = 1) -> list[RejectionReport]:
    if len(configs) == 0:
        raise DomainError("The simulation grid must not be empty")
    reports = []
    for cell_id, config in enumerate(configs):
        reports.append(run_simulation(replace(config, cell_id=cell_id), threads=threads))
    return reports

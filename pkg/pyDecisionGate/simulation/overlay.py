"""Single-metric study of overlaying a sequential deterioration test on a fixed-horizon test."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from pyDecisionGate.errors import DomainError
from pyDecisionGate.numeric import upper_critical
from pyDecisionGate.sequential import DEFAULT_RHO, SpendingKind, crossed
from pyDecisionGate.simulation.harness import (
    CellModel,
    boundary_schedule,
    chunk_sizes,
    chunk_stream,
    simulate_paths,
    standard_error,
)
from pyDecisionGate.simulation.scenario import DEFAULT_REPLICATIONS, default_seed

logger = logging.getLogger(__name__)

MAX_LOOKS = 100


class MetricKind(StrEnum):
    SUCCESS = "success"
    GUARDRAIL = "guardrail"


class Hypothesis(StrEnum):
    H0 = "h0"
    H1 = "h1"


@dataclass(frozen=True)
class OverlayCounts:
    replications: int = 0
    decision: int = 0
    deteriorating: int = 0
    final: int = 0
    both: int = 0

    def __add__(self, other: "OverlayCounts") -> "OverlayCounts":
        return OverlayCounts(
            self.replications + other.replications,
            self.decision + other.decision,
            self.deteriorating + other.deteriorating,
            self.final + other.final,
            self.both + other.both,
        )


@dataclass(frozen=True)
class OverlayReport:
    metric_kind: MetricKind
    hypothesis: Hypothesis
    k_looks: int
    replications: int
    sig_decision: float
    sig_deteriorating: float
    sig_final: float
    sig_both: float

    def rates(self) -> dict[str, float]:
        return {
            "sig_decision": self.sig_decision,
            "sig_deteriorating": self.sig_deteriorating,
            "sig_final": self.sig_final,
            "sig_both": self.sig_both,
        }

    def standard_errors(self) -> dict[str, float]:
        return {name: standard_error(rate, self.replications) for name, rate in self.rates().items()}

    def to_dict(self) -> dict:
        return {
            "metric_kind": self.metric_kind.value,
            "hypothesis": self.hypothesis.value,
            "k_looks": self.k_looks,
            "replications": self.replications,
            "rates": self.rates(),
            "standard_errors": self.standard_errors(),
        }


def _overlay_model(
    metric_kind: MetricKind,
    hypothesis: Hypothesis,
    k_looks: int,
    alpha: float,
    beta: float,
    alpha_minus: float,
    spending_kind: SpendingKind = SpendingKind.OBRIEN_FLEMING,
    rho: float = DEFAULT_RHO,
) -> CellModel:
    critical = upper_critical(alpha)
    shift = critical + upper_critical(beta)
    is_success = metric_kind == MetricKind.SUCCESS
    if is_success:
        drift = shift if hypothesis == Hypothesis.H1 else 0.0
    else:
        drift = -shift if hypothesis == Hypothesis.H0 else 0.0
    return CellModel(
        chol=np.eye(1),
        drift=np.array([drift]),
        fractions=np.arange(1, k_looks + 1) / k_looks,
        success=np.arange(1) if is_success else np.arange(0),
        guardrail=np.arange(0) if is_success else np.arange(1),
        extra=np.arange(0),
        success_critical=critical if is_success else math.inf,
        guardrail_critical=math.inf if is_success else critical,
        nim_shift=0.0 if is_success else shift,
        schedule=boundary_schedule(alpha_minus, k_looks, spending_kind, rho),
        rule=2,
    )


def _overlay_chunk(model: CellModel, stream, size: int) -> OverlayCounts:
    paths = simulate_paths(model, stream, size)
    if model.success.shape[0] > 0:
        final = paths[:, -1, 0] > model.success_critical
    else:
        final = paths[:, -1, 0] + model.nim_shift > model.guardrail_critical
    deteriorating = crossed(paths[:, :, 0], model.schedule, axis=1)  # type: ignore[arg-type]
    return OverlayCounts(
        replications=size,
        decision=int(np.sum(final & ~deteriorating)),
        deteriorating=int(np.sum(deteriorating)),
        final=int(np.sum(final)),
        both=int(np.sum(final & deteriorating)),
    )


def run_appendix_c(
    metric_kind: MetricKind | str,
    hypothesis: Hypothesis | str,
    k_looks: int,
    alpha: float = 0.05,
    beta: float = 0.2,
    alpha_minus: float | None = None,
    replications: int = DEFAULT_REPLICATIONS,
    seed: int | None = None,
    threads: int = 1,
    chunk_size: int = 5_000,
    spending_kind: SpendingKind | str = SpendingKind.OBRIEN_FLEMING,
    rho: float = DEFAULT_RHO,
) -> OverlayReport:
    """Rates of a decision, a deterioration, a final rejection and both on one metric.

    The deterioration test spends alpha_minus (default alpha) over `k_looks` looks, by
    O'Brien-Fleming-type spending unless `spending_kind` selects the alpha * t**rho family.
    A significant decision means the final test rejects and no deterioration was signalled.
    """
    metric_kind = MetricKind(metric_kind)
    hypothesis = Hypothesis(hypothesis)
    spending_kind = SpendingKind(spending_kind)
    if not 1 <= k_looks <= MAX_LOOKS:
        raise DomainError(f"Looks must be in 1..{MAX_LOOKS}, got {k_looks}")
    if replications < 1:
        raise DomainError(f"Replications must be at least 1, got {replications}")
    seed = default_seed() if seed is None else seed
    alpha_minus = alpha if alpha_minus is None else alpha_minus
    model = _overlay_model(metric_kind, hypothesis, k_looks, alpha, beta, alpha_minus, spending_kind, rho)
    sizes = chunk_sizes(replications, chunk_size)
    logger.info("Overlay %s/%s with %d looks", metric_kind.value, hypothesis.value, k_looks)

    def run(chunk_id: int) -> OverlayCounts:
        return _overlay_chunk(model, chunk_stream(seed, 0, chunk_id), sizes[chunk_id])

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(run, range(len(sizes))))
    else:
        parts = [run(chunk_id) for chunk_id in range(len(sizes))]
    total = OverlayCounts()
    for part in parts:
        total = total + part
    return OverlayReport(
        metric_kind=metric_kind,
        hypothesis=hypothesis,
        k_looks=k_looks,
        replications=total.replications,
        sig_decision=total.decision / total.replications,
        sig_deteriorating=total.deteriorating / total.replications,
        sig_final=total.final / total.replications,
        sig_both=total.both / total.replications,
    )


def run_overlay_table(
    k_looks: int = 10,
    alpha: float = 0.05,
    beta: float = 0.2,
    replications: int = DEFAULT_REPLICATIONS,
    seed: int | None = None,
    threads: int = 1,
    spending_kind: SpendingKind | str = SpendingKind.OBRIEN_FLEMING,
    rho: float = DEFAULT_RHO,
) -> list[OverlayReport]:
    return [
        run_appendix_c(
            kind,
            hypothesis,
            k_looks,
            alpha,
            beta,
            None,
            replications,
            seed,
            threads,
            spending_kind=spending_kind,
            rho=rho,
        )
        for kind in MetricKind
        for hypothesis in Hypothesis
    ]

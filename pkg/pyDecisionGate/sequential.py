"""One-sided group-sequential boundaries for deterioration and quality tests.

Boundaries follow Lan-DeMets error spending. The crossing probability at each look is
integrated numerically over the continuation region of the previous looks, using the
independent-increments representation Z_k = B(t_k) / sqrt(t_k). A deterioration is signalled
when the observed statistic falls below -critical_z[k].
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from scipy import special
from scipy.optimize import brentq

from pyDecisionGate.errors import DomainError
from pyDecisionGate.numeric import std_normal_quantile, std_normal_sf, upper_critical

logger = logging.getLogger(__name__)

Z_MAX = 8.5
MIN_NODES = 400
MAX_NODES = 3200
BOUNDARY_TOLERANCE = 1e-5
SEARCH_UPPER = 40.0
DEFAULT_RHO = 2.0


class SpendingKind(StrEnum):
    OBRIEN_FLEMING = "obf"
    POWER = "power"


def obf_spending(t: float, alpha: float) -> float:
    """Cumulative alpha spent at information fraction t by O'Brien-Fleming-type spending."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"Information fraction must be in [0, 1], got {t}")
    if t == 0.0:
        return 0.0
    return 2.0 * std_normal_sf(upper_critical(alpha / 2.0) / math.sqrt(t))


def power_spending(t: float, alpha: float, rho: float = DEFAULT_RHO) -> float:
    """Cumulative alpha spent at information fraction t by alpha * t**rho; rho=1 is Pocock-like."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"Information fraction must be in [0, 1], got {t}")
    if rho <= 0.0:
        raise DomainError(f"Spending exponent must be positive, got {rho}")
    return alpha * t**rho


@dataclass(frozen=True)
class SpendingPlan:
    total_alpha: float
    k_analyses: int
    information_fractions: tuple[float, ...] = ()
    spending_kind: SpendingKind = SpendingKind.OBRIEN_FLEMING
    rho: float = DEFAULT_RHO

    def __post_init__(self):
        if not 0.0 < self.total_alpha < 1.0:
            raise DomainError(f"Total alpha must be in (0, 1), got {self.total_alpha}")
        if self.k_analyses < 1:
            raise DomainError(f"At least one analysis is required, got {self.k_analyses}")
        fractions = tuple(float(value) for value in self.information_fractions)
        if len(fractions) == 0:
            fractions = tuple((index + 1) / self.k_analyses for index in range(self.k_analyses))
        if len(fractions) != self.k_analyses:
            raise DomainError(f"Expected {self.k_analyses} information fractions, got {len(fractions)}")
        if fractions[0] <= 0.0 or any(later <= earlier for earlier, later in zip(fractions, fractions[1:])):
            raise DomainError("Information fractions must be positive and strictly increasing")
        if abs(fractions[-1] - 1.0) > 1e-12:
            raise DomainError(f"The last information fraction must be 1, got {fractions[-1]}")
        object.__setattr__(self, "information_fractions", fractions[:-1] + (1.0,))
        object.__setattr__(self, "spending_kind", SpendingKind(self.spending_kind))
        if self.rho <= 0.0:
            raise DomainError(f"Spending exponent must be positive, got {self.rho}")

    @classmethod
    def equally_spaced(
        cls,
        total_alpha: float,
        k_analyses: int,
        spending_kind: SpendingKind = SpendingKind.OBRIEN_FLEMING,
        rho: float = DEFAULT_RHO,
    ) -> "SpendingPlan":
        return cls(total_alpha=total_alpha, k_analyses=k_analyses, spending_kind=spending_kind, rho=rho)

    def spent(self, t: float) -> float:
        if self.spending_kind == SpendingKind.POWER:
            return power_spending(t, self.total_alpha, self.rho)
        return obf_spending(t, self.total_alpha)

    def cumulative_alpha(self) -> list[float]:
        spent = [self.spent(t) for t in self.information_fractions]
        spent[-1] = self.total_alpha
        return spent

    def incremental_alpha(self) -> list[float]:
        cumulative = self.cumulative_alpha()
        return [later - earlier for earlier, later in zip([0.0] + cumulative[:-1], cumulative)]


@dataclass(frozen=True)
class BoundarySchedule:
    critical_z: tuple[float, ...]
    incremental_alpha: tuple[float, ...]
    information_fractions: tuple[float, ...] = field(default=())

    @property
    def k_analyses(self) -> int:
        return len(self.critical_z)

    def lower_bounds(self) -> np.ndarray:
        return -np.asarray(self.critical_z, dtype=float)

    def to_dict(self) -> dict:
        return {
            "looks": [
                {
                    "look": index + 1,
                    "information_fraction": fraction,
                    "critical_z": None if math.isinf(bound) else bound,
                    "spent_alpha": spent,
                }
                for index, (fraction, bound, spent) in enumerate(
                    zip(self.information_fractions, self.critical_z, self.incremental_alpha)
                )
            ]
        }


def _grid(upper: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    upper = min(upper, Z_MAX)
    points = np.linspace(-Z_MAX, upper, nodes)
    weights = np.full(nodes, points[1] - points[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return points, weights


def _first_boundary(increment: float) -> float:
    if increment <= 0.0:
        return math.inf
    return -std_normal_quantile(increment)


def _solve_boundary(mass: np.ndarray, points: np.ndarray, t_prev: float, t_now: float, increment: float) -> float:
    scale = math.sqrt(t_now - t_prev)
    shifted = points * math.sqrt(t_prev)

    def crossing(bound: float) -> float:
        return float(np.dot(mass, special.ndtr((shifted - bound * math.sqrt(t_now)) / scale)))

    if increment <= 0.0 or crossing(SEARCH_UPPER) >= increment:
        return math.inf
    lower = -Z_MAX
    if crossing(lower) < increment:
        raise DomainError(f"Spent alpha {increment:.3e} exceeds the remaining crossing probability")
    return float(brentq(lambda bound: crossing(bound) - increment, lower, SEARCH_UPPER, xtol=1e-10))


def _propagate(mass: np.ndarray, points: np.ndarray, t_prev: float, t_now: float, upper: float, nodes: int):
    scale = math.sqrt(t_now - t_prev)
    new_points, new_weights = _grid(upper, nodes)
    kernel = (new_points[:, None] * math.sqrt(t_now) - points[None, :] * math.sqrt(t_prev)) / scale
    density = np.exp(-0.5 * kernel**2) @ mass / math.sqrt(2.0 * math.pi) * math.sqrt(t_now) / scale
    return density * new_weights, new_points


def _boundaries(fractions: Sequence[float], increments: Sequence[float], nodes: int) -> list[float]:
    bounds = [_first_boundary(increments[0])]
    points, weights = _grid(bounds[0], nodes)
    mass = np.exp(-0.5 * points**2) / math.sqrt(2.0 * math.pi) * weights
    for look in range(1, len(fractions)):
        t_prev, t_now = fractions[look - 1], fractions[look]
        bound = _solve_boundary(mass, points, t_prev, t_now, increments[look])
        bounds.append(bound)
        if look < len(fractions) - 1:
            mass, points = _propagate(mass, points, t_prev, t_now, bound, nodes)
    return bounds


def _max_change(first: list[float], second: list[float]) -> float:
    change = 0.0
    for left, right in zip(first, second):
        if math.isinf(left) and math.isinf(right):
            continue
        change = max(change, abs(left - right))
    return change


def compute_boundaries(plan: SpendingPlan) -> BoundarySchedule:
    fractions = plan.information_fractions
    increments = plan.incremental_alpha()
    nodes = MIN_NODES
    bounds = _boundaries(fractions, increments, nodes)
    while len(fractions) > 1 and nodes < MAX_NODES:
        nodes *= 2
        refined = _boundaries(fractions, increments, nodes)
        change = _max_change(bounds, refined)
        logger.debug("Boundary grid with %d nodes changed by %.2e", nodes, change)
        bounds = refined
        if change < BOUNDARY_TOLERANCE:
            break
    else:
        if len(fractions) > 1:
            logger.warning("Boundary grid reached %d nodes before converging", nodes)
    return BoundarySchedule(
        critical_z=tuple(bounds),
        incremental_alpha=tuple(increments),
        information_fractions=tuple(fractions),
    )


def evaluate_sequential(stat_path: Sequence[float], schedule: BoundarySchedule) -> int | None:
    """1-based index of the first look whose statistic falls below -critical_z, else None."""
    if len(stat_path) > schedule.k_analyses:
        raise DomainError(f"Path has {len(stat_path)} looks, the schedule only {schedule.k_analyses}")
    for look, (statistic, bound) in enumerate(zip(stat_path, schedule.critical_z), start=1):
        if statistic < -bound:
            return look
    return None


def crossed(paths: np.ndarray, schedule: BoundarySchedule, axis: int = 1) -> np.ndarray:
    """Whether each path crosses the deterioration boundary at any look along `axis`."""
    paths = np.moveaxis(np.asarray(paths, dtype=float), axis, -1)
    if paths.shape[-1] != schedule.k_analyses:
        raise DomainError(f"Paths have {paths.shape[-1]} looks, the schedule {schedule.k_analyses}")
    return np.any(paths < schedule.lower_bounds(), axis=-1)

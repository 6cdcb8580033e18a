import math

import numpy as np
import pytest

from pyDecisionGate.errors import DomainError
from pyDecisionGate.numeric import RandomStream
from pyDecisionGate.sequential import (
    BoundarySchedule,
    SpendingKind,
    SpendingPlan,
    compute_boundaries,
    crossed,
    evaluate_sequential,
    obf_spending,
    power_spending,
)


def test_single_look_is_fixed_horizon():
    schedule = compute_boundaries(SpendingPlan(total_alpha=0.05, k_analyses=1))
    assert schedule.critical_z == pytest.approx((1.644854,), abs=1e-6)
    assert schedule.incremental_alpha == (0.05,)


def test_two_looks():
    schedule = compute_boundaries(SpendingPlan(total_alpha=0.025, k_analyses=2))
    assert schedule.critical_z == pytest.approx((2.963, 1.969), abs=0.005)


def test_spending_adds_up():
    plan = SpendingPlan.equally_spaced(0.05 / 14, 10)
    increments = plan.incremental_alpha()
    assert sum(increments) == pytest.approx(0.05 / 14, rel=1e-12)
    assert all(increment >= 0.0 for increment in increments)
    assert plan.cumulative_alpha()[-1] == 0.05 / 14


def test_obf_spending_limits():
    assert obf_spending(0.0, 0.05) == 0.0
    assert obf_spending(1.0, 0.05) == pytest.approx(0.05)
    with pytest.raises(DomainError):
        obf_spending(1.5, 0.05)


def test_boundaries_decrease_over_looks():
    schedule = compute_boundaries(SpendingPlan(total_alpha=0.05, k_analyses=10))
    finite = [bound for bound in schedule.critical_z if math.isfinite(bound)]
    assert finite == sorted(finite, reverse=True)
    assert schedule.critical_z[-1] > 1.644854


def test_schedule_to_dict():
    schedule = BoundarySchedule((math.inf, 2.0), (0.0, 0.05), (0.5, 1.0))
    looks = schedule.to_dict()["looks"]
    assert looks[0]["critical_z"] is None
    assert looks[1] == {"look": 2, "information_fraction": 1.0, "critical_z": 2.0, "spent_alpha": 0.05}


@pytest.mark.parametrize(
    "fractions",
    [(0.5, 0.4, 1.0), (0.0, 0.5, 1.0), (0.3, 0.6, 0.9)],
)
def test_invalid_information_fractions(fractions):
    with pytest.raises(DomainError):
        SpendingPlan(total_alpha=0.05, k_analyses=3, information_fractions=fractions)


def test_unequal_information_fractions():
    schedule = compute_boundaries(SpendingPlan(total_alpha=0.025, k_analyses=3, information_fractions=(0.2, 0.7, 1.0)))
    assert schedule.information_fractions == (0.2, 0.7, 1.0)
    assert schedule.critical_z[0] > schedule.critical_z[1] > schedule.critical_z[2]


def test_evaluate_sequential():
    schedule = BoundarySchedule((3.0, 2.5, 2.0), (0.001, 0.005, 0.01))
    assert evaluate_sequential([0.0, 0.0, 0.0], schedule) is None
    assert evaluate_sequential([-3.5], schedule) == 1
    assert evaluate_sequential([-1.0, -2.6, -3.0], schedule) == 2
    assert evaluate_sequential([], schedule) is None


def test_later_looks_never_undo_a_crossing():
    schedule = BoundarySchedule((3.0, 2.5, 2.0), (0.001, 0.005, 0.01))
    path = [-1.0, -2.6, 5.0]
    assert evaluate_sequential(path[:2], schedule) == evaluate_sequential(path, schedule) == 2


def test_path_longer_than_schedule():
    schedule = BoundarySchedule((2.0,), (0.05,))
    with pytest.raises(DomainError):
        evaluate_sequential([0.0, 0.0], schedule)


def test_single_look_matches_inferiority_test():
    schedule = compute_boundaries(SpendingPlan(total_alpha=0.05, k_analyses=1))
    statistics = RandomStream(seed=5).standard_normal(10_000) * 2.0
    sequential = crossed(statistics[:, None], schedule)
    fixed = statistics < -1.6448536269514722
    assert np.array_equal(sequential, fixed)


def test_crossing_rate_under_null():
    alpha = 0.05 / 14
    looks = 10
    schedule = compute_boundaries(SpendingPlan(total_alpha=alpha, k_analyses=looks))
    replications = 200_000
    increments = RandomStream(seed=99).standard_normal((replications, looks))
    steps = np.arange(1, looks + 1)
    paths = np.cumsum(increments, axis=1) / np.sqrt(steps)
    rate = float(np.mean(crossed(paths, schedule)))
    error = math.sqrt(alpha * (1 - alpha) / replications)
    assert abs(rate - alpha) < 4 * error


@pytest.mark.slow
def test_crossing_rate_with_hundred_looks():
    alpha = 0.05
    looks = 100
    schedule = compute_boundaries(SpendingPlan(total_alpha=alpha, k_analyses=looks))
    replications = 100_000
    increments = RandomStream(seed=7).standard_normal((replications, looks))
    paths = np.cumsum(increments, axis=1) / np.sqrt(np.arange(1, looks + 1))
    rate = float(np.mean(crossed(paths, schedule)))
    assert abs(rate - alpha) < 4 * math.sqrt(alpha * (1 - alpha) / replications)


def _brownian_statistics(seed: int, replications: int, looks: int, drift: float = 0.0) -> np.ndarray:
    increments = RandomStream(seed=seed).standard_normal((replications, looks)) / math.sqrt(looks)
    fractions = np.arange(1, looks + 1) / looks
    return np.cumsum(increments, axis=1) / np.sqrt(fractions) + drift * np.sqrt(fractions)


@pytest.mark.parametrize("alpha", [0.001, 0.0036])
def test_crossing_rate_at_small_levels(alpha):
    looks = 10
    replications = 400_000
    schedule = compute_boundaries(SpendingPlan(total_alpha=alpha, k_analyses=looks))
    rate = float(np.mean(crossed(_brownian_statistics(31, replications, looks), schedule)))
    assert abs(rate - alpha) < 4 * math.sqrt(alpha * (1 - alpha) / replications)


def test_more_looks_cost_power():
    drift = -(1.6448536269514722 + 0.8416212335729143)
    statistics = _brownian_statistics(41, 50_000, 10, drift)
    fixed = compute_boundaries(SpendingPlan(total_alpha=0.05, k_analyses=1))
    sequential = compute_boundaries(SpendingPlan(total_alpha=0.05, k_analyses=10))
    fixed_power = float(np.mean(crossed(statistics[:, -1:], fixed)))
    sequential_power = float(np.mean(crossed(statistics, sequential)))
    assert fixed_power == pytest.approx(0.8, abs=0.01)
    assert sequential_power < fixed_power - 0.005


def test_power_spending():
    assert power_spending(0.5, 0.05, rho=2.0) == pytest.approx(0.0125)
    assert power_spending(1.0, 0.05, rho=3.0) == pytest.approx(0.05)
    with pytest.raises(DomainError):
        power_spending(0.5, 0.05, rho=0.0)
    with pytest.raises(DomainError):
        SpendingPlan(total_alpha=0.05, k_analyses=2, spending_kind=SpendingKind.POWER, rho=-1.0)


def test_power_spending_plan():
    plan = SpendingPlan.equally_spaced(0.05, 10, SpendingKind.POWER, rho=1.0)
    assert plan.incremental_alpha() == pytest.approx([0.005] * 10)
    schedule = compute_boundaries(plan)
    assert schedule.critical_z[0] == pytest.approx(2.5758293, abs=1e-6)
    assert schedule.critical_z[-1] > compute_boundaries(SpendingPlan.equally_spaced(0.05, 10)).critical_z[-1]


def test_power_spending_holds_size():
    alpha = 0.05
    looks = 10
    replications = 200_000
    schedule = compute_boundaries(SpendingPlan.equally_spaced(alpha, looks, SpendingKind.POWER, rho=2.0))
    rate = float(np.mean(crossed(_brownian_statistics(53, replications, looks), schedule)))
    assert abs(rate - alpha) < 4 * math.sqrt(alpha * (1 - alpha) / replications)

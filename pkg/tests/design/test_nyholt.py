import numpy as np
import pytest

from pyDecisionGate.design.corrections import correct_prop41, correct_prop41_improved
from pyDecisionGate.design.model import CorrectionKind, CorrectionPolicy, MetricCounts, RiskBudget
from pyDecisionGate.design.nyholt import apply_nyholt, effective_counts, effective_phi, nyholt_effective_tests
from pyDecisionGate.errors import PlanningError
from pyDecisionGate.numeric import CorrelationMatrix

BUDGET = RiskBudget(alpha=0.05, alpha_minus=0.05, beta=0.2)
COUNTS = MetricCounts(S=5, G=5, D=2, Q=2)
PROP41 = CorrectionPolicy(CorrectionKind.PROP41, nyholt=True)
STRONG = CorrelationMatrix.equicorrelated(5, 0.99)


def test_independent_metrics_count_fully():
    assert nyholt_effective_tests(CorrelationMatrix.identity(5)) == pytest.approx(5.0)


def test_identical_metrics_count_once():
    assert nyholt_effective_tests(CorrelationMatrix.equicorrelated(5, 1.0)) == pytest.approx(1.0)


def test_strongly_correlated_metrics():
    assert nyholt_effective_tests(STRONG) == pytest.approx(1.0796, abs=1e-4)


def test_single_metric():
    assert nyholt_effective_tests(CorrelationMatrix.identity(1)) == 1.0


def test_effective_tests_are_bounded():
    rng = np.random.default_rng(3)
    for dim in (2, 3, 6, 10):
        factor = rng.standard_normal((dim, dim))
        covariance = factor @ factor.T + 0.1 * np.eye(dim)
        scale = np.sqrt(np.diag(covariance))
        entries = covariance / np.outer(scale, scale)
        np.fill_diagonal(entries, 1.0)
        effective = nyholt_effective_tests(CorrelationMatrix((entries + entries.T) / 2.0))
        assert 1.0 <= effective <= dim


def test_effective_counts_without_matrices():
    assert effective_counts(COUNTS, None, None) == {"success": 5.0, "guardrail": 5.0}
    assert effective_counts(MetricCounts(S=2), None, None) == {"success": 2.0}


def test_identity_matrices_keep_levels():
    identity = CorrelationMatrix.identity(5)
    nyholt = apply_nyholt(COUNTS, BUDGET, PROP41, identity, identity)
    plain = correct_prop41(COUNTS, BUDGET)
    assert nyholt.alpha_success == pytest.approx(plain.alpha_success)
    assert nyholt.alpha_minus_star == pytest.approx(plain.alpha_minus_star)
    assert nyholt.beta_star == pytest.approx(correct_prop41_improved(COUNTS, BUDGET).beta_star)
    assert nyholt.beta_star == pytest.approx(0.029412, abs=1e-6)


def test_correlated_blocks_relax_levels():
    correction = apply_nyholt(COUNTS, BUDGET, PROP41, STRONG, STRONG)
    effective = nyholt_effective_tests(STRONG)
    assert correction.alpha_success == pytest.approx(0.05 / effective)
    phi = (2 + effective + 2 - 1) / (2 * effective + 4) * 0.05
    assert correction.beta_star == pytest.approx((0.2 - phi) / ((1 - phi) * (effective + 1)))
    assert correction.alpha_minus_star == pytest.approx(0.05 / 14)


def test_deterioration_level_uses_effective_counts():
    policy = CorrectionPolicy(CorrectionKind.PROP41, nyholt=True, nyholt_deterioration=True)
    correction = apply_nyholt(COUNTS, BUDGET, policy, STRONG, STRONG)
    effective = nyholt_effective_tests(STRONG)
    assert correction.alpha_minus_star == pytest.approx(0.05 / (2 * effective + 4))


def test_dimension_mismatch():
    with pytest.raises(PlanningError):
        apply_nyholt(COUNTS, BUDGET, PROP41, CorrelationMatrix.identity(4), None)


def test_correlated_blocks_beta_star():
    correction = apply_nyholt(COUNTS, BUDGET, PROP41, STRONG, STRONG)
    assert correction.beta_star == pytest.approx(0.0830, abs=2e-4)
    plain = correct_prop41(COUNTS, BUDGET, success=1.0796, guardrail=1.0796)
    assert correction.beta_star > plain.beta_star


def test_block_with_independent_guardrails():
    correction = apply_nyholt(COUNTS, BUDGET, PROP41, STRONG, CorrelationMatrix.identity(5))
    assert correction.beta_star == pytest.approx(0.0306, abs=2e-4)
    assert (1 - correction.beta_star) ** 5 == pytest.approx(0.856, abs=0.002)


@pytest.mark.parametrize(
    "kind, expected",
    [
        (CorrectionKind.PROP41, 8 / 14 * 0.05),
        (CorrectionKind.PROP41_IMPROVED, 8 / 14 * 0.05),
        (CorrectionKind.PROP41_IMPROVED_REMARK, 4 / 14 * 0.05),
        (CorrectionKind.PROP41_GUARDRAIL, 11 / 12 * 0.05),
    ],
)
def test_effective_phi_with_full_counts(kind, expected):
    assert effective_phi(kind, COUNTS, 0.05, 5.0, 5.0) == pytest.approx(expected)


def test_effective_phi_without_success_metrics():
    counts = MetricCounts(G=3, D=1)
    assert effective_phi(CorrectionKind.PROP41, counts, 0.05, None, 3.0) == pytest.approx(0.0)

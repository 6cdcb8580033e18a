import numpy as np
import pytest

from pyDecisionGate.design.analytic import analytic_rule1_error_rates
from pyDecisionGate.design.model import CorrectionKind, CorrectionPolicy, MetricCounts, RiskBudget
from pyDecisionGate.errors import DomainError
from pyDecisionGate.numeric import CorrelationMatrix
from pyDecisionGate.simulation.harness import (
    build_cell_model,
    chunk_sizes,
    chunk_stream,
    run_simulation,
    run_table,
    simulate_paths,
)
from pyDecisionGate.simulation.scenario import (
    CovarianceStructure,
    Scenario,
    SimulationConfig,
    build_correlation,
    default_seed,
    study_grid,
)

BUDGET = RiskBudget(alpha=0.05, alpha_minus=0.05, beta=0.2)
PROP33 = CorrectionPolicy(CorrectionKind.PROP33)
PROP41 = CorrectionPolicy(CorrectionKind.PROP41)
NONE = CorrectionPolicy(CorrectionKind.NONE)
NYHOLT = CorrectionPolicy(CorrectionKind.PROP41, nyholt=True, nyholt_deterioration=True)


def _within(rate: float, expected: float, tolerance: float) -> bool:
    return abs(rate - expected) <= tolerance


def test_default_seed(monkeypatch):
    monkeypatch.delenv("DECISION_GATE_SEED", raising=False)
    assert default_seed() == 20240101
    monkeypatch.setenv("DECISION_GATE_SEED", "42")
    assert default_seed() == 42
    monkeypatch.setenv("DECISION_GATE_SEED", "forty-two")
    with pytest.raises(DomainError):
        default_seed()


def test_block_structures():
    block1 = build_correlation(CovarianceStructure.BLOCK1, 2, 3)
    assert block1.entries[0, 1] == pytest.approx(0.99)
    assert block1.entries[2, 3] == 0.0
    block2 = build_correlation("block2", 2, 3)
    assert block2.entries[0, 1] == 0.0
    assert block2.entries[2, 3] == pytest.approx(0.99)
    assert block2.entries[1, 2] == 0.0


def test_explicit_structure_checks_dimension():
    with pytest.raises(DomainError):
        SimulationConfig(counts=MetricCounts(S=2, G=2), correlation=CorrelationMatrix.identity(3))
    config = SimulationConfig(counts=MetricCounts(S=1, G=1), correlation=CorrelationMatrix.equicorrelated(2, 0.5))
    assert config.structure == CovarianceStructure.EXPLICIT


def test_paths_are_standardized():
    config = SimulationConfig(counts=MetricCounts(S=1, G=1), policy=PROP41, k_looks=5, seed=3)
    model = build_cell_model(config)
    paths = simulate_paths(model, chunk_stream(3, 0, 0), 100_000)
    assert paths.shape == (100_000, 5, 2)
    assert np.std(paths[:, :, 1], axis=0) == pytest.approx([1.0] * 5, abs=0.01)
    correlation = np.corrcoef(paths[:, 0, 1], paths[:, -1, 1])[0, 1]
    assert correlation == pytest.approx(np.sqrt(1 / 5), abs=0.01)


def test_chunk_sizes():
    assert chunk_sizes(12_000, 5_000) == [5_000, 5_000, 2_000]
    assert chunk_sizes(1, 5_000) == [1]


def test_single_replication():
    report = run_simulation(SimulationConfig(replications=1, seed=7))
    assert report.replications == 1
    assert all(rate in (0.0, 1.0) for rate in report.rates().values())


def test_same_seed_same_report():
    config = SimulationConfig(counts=MetricCounts(S=2, G=2, D=1, Q=1), replications=3_000, chunk_size=1_000, seed=11)
    assert run_simulation(config) == run_simulation(config)


def test_thread_count_does_not_change_results():
    config = SimulationConfig(counts=MetricCounts(S=2, G=2, D=1, Q=1), replications=3_000, chunk_size=500, seed=11)
    assert run_simulation(config, threads=1) == run_simulation(config, threads=4)


def test_table_has_one_report_per_cell():
    grid = study_grid(
        scenarios=[Scenario.STATUS_QUO],
        counts=MetricCounts(S=1, G=1),
        replications=200,
        k_looks=2,
        seed=5,
    )
    reports = run_table(grid)
    assert len(grid) == 12
    assert [(report.structure, report.correction) for report in reports[:3]] == [
        ("independent", "none"),
        ("independent", "only_alpha"),
        ("independent", "prop41"),
    ]


def test_nyholt_grid_adds_policy():
    grid = study_grid(nyholt=True, replications=10)
    assert len(grid) == 48
    assert grid[3].policy.label == "prop41+nyholt"


def test_empty_table():
    with pytest.raises(DomainError):
        run_table([])


def test_success_power_matches_target():
    config = SimulationConfig(
        counts=MetricCounts(S=1),
        policy=PROP41,
        scenario=Scenario.GLOBAL_H1,
        replications=20_000,
        k_looks=1,
        seed=21,
    )
    report = run_simulation(config)
    target = 1 - 0.15 / 0.95
    assert _within(report.R_S, target, 3 * np.sqrt(target * (1 - target) / 20_000))


@pytest.mark.parametrize("structure", ["independent", "perfectly_correlated"])
def test_rule1_matches_closed_form(structure):
    counts = MetricCounts(S=2, G=2)
    type1, power = analytic_rule1_error_rates(counts, BUDGET, structure, corrected=True)
    for scenario, expected in ((Scenario.GLOBAL_H0, type1), (Scenario.GLOBAL_H1, power)):
        config = SimulationConfig(
            counts=counts,
            policy=PROP33,
            scenario=scenario,
            structure=structure,
            replications=20_000,
            k_looks=1,
            seed=8,
        )
        report = run_simulation(config)
        error = max(np.sqrt(expected * (1 - expected) / 20_000), 1e-4)
        assert _within(report.decision_rate, expected, 4 * error)


@pytest.mark.slow
@pytest.mark.parametrize(
    "scenario, policy, structure, expected, tolerance",
    [
        (Scenario.STATUS_QUO, PROP41, "independent", 0.042, 0.006),
        (Scenario.STATUS_QUO, NONE, "independent", 0.047, 0.006),
        (Scenario.GLOBAL_H1, PROP41, "independent", 0.859, 0.010),
        (Scenario.GLOBAL_H1, NONE, "independent", 0.255, 0.010),
        (Scenario.GLOBAL_H1, PROP41, "dependent", 0.952, 0.008),
        (Scenario.GLOBAL_H0, PROP41, "dependent", 0.014, 0.005),
        (
            Scenario.STATUS_QUO,
            CorrectionPolicy(CorrectionKind.PROP41, nyholt=True, nyholt_deterioration=True),
            "dependent",
            0.056,
            0.008,
        ),
        (
            Scenario.GLOBAL_H1,
            CorrectionPolicy(CorrectionKind.PROP41, nyholt=True, nyholt_deterioration=True),
            "dependent",
            0.869,
            0.010,
        ),
        (Scenario.GLOBAL_H1, NYHOLT, "block1", 0.814, 0.015),
        (Scenario.GLOBAL_H1, NYHOLT, "block2", 0.874, 0.020),
    ],
)
def test_study_cells(scenario, policy, structure, expected, tolerance):
    config = SimulationConfig(scenario=scenario, policy=policy, structure=structure, seed=20240101)
    report = run_simulation(config, threads=4)
    assert _within(report.decision_rate, expected, tolerance)


@pytest.mark.slow
@pytest.mark.parametrize("scenario", [Scenario.GLOBAL_H0, Scenario.STATUS_QUO])
def test_nulls_are_controlled_on_the_grid(scenario):
    grid = study_grid(
        scenarios=[scenario],
        corrections=[CorrectionKind.PROP41, CorrectionKind.PROP41_IMPROVED],
        seed=1,
    )
    assert len(grid) == 8
    for report in run_table(grid, threads=4):
        assert report.decision_rate <= 0.05 + 3 * report.se_decision, report.to_dict()


@pytest.mark.slow
def test_power_holds_on_the_grid():
    grid = study_grid(
        scenarios=[Scenario.GLOBAL_H1],
        corrections=[CorrectionKind.PROP41, CorrectionKind.PROP41_IMPROVED],
        seed=2,
    )
    assert len(grid) == 8
    for report in run_table(grid, threads=4):
        assert report.decision_rate >= 0.8 - 3 * report.se_decision, report.to_dict()

import json

import pytest

from pyDecisionGate import factory
from pyDecisionGate.design.model import CorrectionKind
from pyDecisionGate.errors import ConfigurationError
from pyDecisionGate.factory.config import parse_config, read_config
from pyDecisionGate.model import Direction, QualityKind, Role

CONFIG = {
    "metrics": [
        {"id": "conversion", "roles": ["success"], "variance": 1.0, "mde": 0.1},
        {"id": "latency", "roles": ["guardrail"], "variance": 1.0, "nim": 0.05, "direction": "decrease_good"},
        {"id": "revenue", "roles": ["deterioration"], "variance": 1.0},
        {"id": "srm", "roles": ["quality"], "quality_kind": "srm"},
    ],
    "budget": {"alpha": 0.05, "beta": 0.2},
    "policy": {"correction": "prop41"},
    "sequential": {"k_looks": 3},
}

TOML_CONFIG = """
[budget]
alpha = 0.05
alpha_minus = 0.05
beta = 0.2

[policy]
correction = "prop41_improved"

[[metrics]]
id = "conversion"
roles = ["success"]
variance = 1.0
mde = 0.1
"""


def _with_metric(index: int, **values) -> dict:
    metrics = [dict(metric) for metric in CONFIG["metrics"]]
    metrics[index].update(values)
    return dict(CONFIG, metrics=metrics)


def test_parse_config():
    config = parse_config(CONFIG)
    assert [metric.id for metric in config.metrics] == ["conversion", "latency", "revenue", "srm"]
    assert config.metrics[1].direction == Direction.DECREASE_GOOD
    assert config.metrics[3].quality_kind == QualityKind.SRM
    assert config.metrics[2].roles == frozenset({Role.DETERIORATION})
    assert config.budget.alpha_minus == 0.05
    assert config.policy.kind == CorrectionKind.PROP41
    assert config.sequential.k_looks == 3


def test_boundaries_only_with_several_looks():
    config = parse_config(CONFIG)
    plan = config.design_plan()
    schedule = config.boundary_schedule(plan)
    assert schedule is not None and schedule.k_analyses == 3
    assert parse_config(dict(CONFIG, sequential={})).boundary_schedule(plan) is None


def test_guardrail_without_margin():
    metrics = [dict(metric) for metric in CONFIG["metrics"]]
    del metrics[1]["nim"]
    with pytest.raises(ConfigurationError) as error:
        parse_config(dict(CONFIG, metrics=metrics))
    assert error.value.field_path == "metrics[1].nim"


@pytest.mark.parametrize(
    "index, values, field_path",
    [
        (0, {"roles": ["winner"]}, "metrics[0].roles[0]"),
        (0, {"variance": "high"}, "metrics[0].variance"),
        (1, {"direction": "sideways"}, "metrics[1].direction"),
        (2, {"variance": -1.0}, "metrics[2].variance"),
        (3, {"id": "conversion"}, "metrics[3].id"),
    ],
)
def test_invalid_metric_fields(index, values, field_path):
    with pytest.raises(ConfigurationError) as error:
        parse_config(_with_metric(index, **values))
    assert error.value.field_path == field_path


def test_invalid_correction():
    with pytest.raises(ConfigurationError) as error:
        parse_config(dict(CONFIG, policy={"correction": "bonferroni"}))
    assert error.value.field_path == "policy.correction"


@pytest.mark.parametrize(
    "budget, field_path",
    [
        ({"alpha": 1.5}, "budget.alpha"),
        ({"alpha": 0.0}, "budget.alpha"),
        ({"alpha_minus": -0.01}, "budget.alpha_minus"),
        ({"beta": 1.0}, "budget.beta"),
    ],
)
def test_invalid_budget(budget, field_path):
    with pytest.raises(ConfigurationError) as error:
        parse_config(dict(CONFIG, budget=dict(CONFIG["budget"], **budget)))
    assert error.value.field_path == field_path


def test_budget_allows_no_deterioration_level():
    config = parse_config(dict(CONFIG, budget={"alpha": 0.05, "alpha_minus": 0.0, "beta": 0.2}))
    assert config.budget.alpha_minus == 0.0


def test_invalid_looks():
    with pytest.raises(ConfigurationError) as error:
        parse_config(dict(CONFIG, sequential={"k_looks": 0}))
    assert error.value.field_path == "sequential.k_looks"


def test_invalid_spending_exponent():
    with pytest.raises(ConfigurationError) as error:
        parse_config(dict(CONFIG, sequential={"k_looks": 3, "spending": "power", "rho": 0.0}))
    assert error.value.field_path == "sequential.rho"


def test_srm_metric_id():
    assert parse_config(CONFIG).srm_metric_id() == "srm"
    assert parse_config(_with_metric(3, id="split")).srm_metric_id() == "split"
    assert parse_config(_with_metric(3, quality_kind="external")).srm_metric_id() is None


def test_correlations():
    config = parse_config(dict(CONFIG, correlations={"success": [[1.0]]}))
    assert config.corr_success is not None and config.corr_success.dim == 1
    with pytest.raises(ConfigurationError) as error:
        parse_config(dict(CONFIG, correlations={"guardrail": [[1.0, 0.5], [0.4, 1.0]]}))
    assert error.value.field_path == "correlations.guardrail"


def test_metrics_are_required():
    with pytest.raises(ConfigurationError) as error:
        parse_config({"budget": {}})
    assert error.value.field_path == "metrics"


def test_read_toml(tmp_path):
    path = tmp_path / "experiment.toml"
    path.write_text(TOML_CONFIG, encoding="utf-8")
    config = read_config(path)
    assert config.policy.kind == CorrectionKind.PROP41_IMPROVED
    assert config.metrics[0].mde == 0.1


def test_read_json(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(CONFIG), encoding="utf-8")
    assert len(read_config(path).metrics) == 4


def test_broken_files(tmp_path):
    toml_path = tmp_path / "broken.toml"
    toml_path.write_text("[budget\nalpha = ", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        read_config(toml_path)
    json_path = tmp_path / "list.json"
    json_path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="top level"):
        read_config(json_path)
    with pytest.raises(ConfigurationError, match="cannot read"):
        read_config(tmp_path / "missing.toml")


@pytest.mark.parametrize("extension", ["toml", ".yaml"])
def test_unsupported_extension(extension):
    with pytest.raises(ValueError):
        factory.get(extension)

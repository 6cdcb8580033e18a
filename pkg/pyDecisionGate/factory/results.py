from pathlib import Path

from pyDecisionGate import factory
from pyDecisionGate.errors import ConfigurationError, DomainError
from pyDecisionGate.factory import schema
from pyDecisionGate.model import ExperimentResults, MetricReadout, SrmCounts

DEFAULT_SRM_ID = "srm"


def _unique(metric_id: str, seen: set[str], path: str) -> None:
    if metric_id in seen:
        raise ConfigurationError(path, f"metric '{metric_id}' is reported more than once")
    seen.add(metric_id)


def _z_path(values: dict, path: str) -> list[float] | None:
    if "z_path" not in values:
        return None
    raw = schema.array(values, "z_path", path)
    return [schema.number({"z": value}, "z", f"{path}.z_path[{index}]") for index, value in enumerate(raw)]


def parse_readout(values: dict, path: str) -> MetricReadout:
    try:
        return MetricReadout(
            estimate=schema.number(values, "estimate", path),
            std_error=schema.number(values, "std_error", path),
            n_treatment=schema.integer(values, "n_treatment", path, 1),
            n_control=schema.integer(values, "n_control", path, 1),
        )
    except DomainError as exc:
        raise ConfigurationError(path, str(exc)) from exc


def parse_results(values: dict, srm_id: str | None = None) -> ExperimentResults:
    """SRM counts without an id are filed under `srm_id`, or "srm" when none is configured."""
    srm_id = srm_id or DEFAULT_SRM_ID
    values = schema.table(values, "results")
    results = ExperimentResults()
    seen: set[str] = set()
    for index, item in enumerate(schema.array(values, "metrics")):
        path = f"metrics[{index}]"
        item = schema.table(item, path)
        metric_id = schema.text(item, "id", path)
        _unique(metric_id, seen, f"{path}.id")
        results.readouts[metric_id] = parse_readout(item, path)
        z_path = _z_path(item, path)
        if z_path is not None:
            results.z_paths[metric_id] = z_path
    quality = schema.section(values, "quality")
    for index, item in enumerate(schema.array(quality, "srm", "quality")):
        path = f"quality.srm[{index}]"
        item = schema.table(item, path)
        metric_id = schema.text(item, "id", path, srm_id)
        _unique(metric_id, seen, f"{path}.id")
        treatment = schema.integer(item, "treatment_count", path)
        control = schema.integer(item, "control_count", path)
        if treatment < 0 or control < 0:
            raise ConfigurationError(path, "group counts must be non-negative")
        ratio = schema.optional_number(item, "planned_ratio", path)
        results.srm[metric_id] = SrmCounts(treatment, control, ratio)
    for index, item in enumerate(schema.array(quality, "external_quality_pvalues", "quality")):
        path = f"quality.external_quality_pvalues[{index}]"
        item = schema.table(item, path)
        metric_id = schema.text(item, "id", path)
        _unique(metric_id, seen, f"{path}.id")
        p_value = schema.number(item, "p_value", path)
        if not 0.0 <= p_value <= 1.0:
            raise ConfigurationError(f"{path}.p_value", f"must be in [0, 1], got {p_value}")
        results.external_p_values[metric_id] = p_value
    return results


def read_results(path: Path, srm_id: str | None = None) -> ExperimentResults:
    return parse_results(factory.read(path), srm_id)

import json
import math
from typing import Any


def format_number(value: float | int | None) -> str:
    """Six significant digits, trailing zeros kept."""
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return f"{value:#.6g}"


def ensure_newline(text: str) -> str:
    if text.endswith("\n"):
        return text
    return f"{text}\n"


def as_string(*values: str, separator: str) -> str:
    if len(values) == 0:
        return ""
    if len(values) == 1:
        return values[0]
    return separator.join([value for value in values if len(value) > 0])


def as_table(header: list[str], rows: list[list[Any]], separator: str = ",") -> str:
    lines = [as_string(*header, separator=separator)]
    for row in rows:
        cells = [value if isinstance(value, str) else format_number(value) for value in row]
        lines.append(separator.join(cells))
    return ensure_newline("\n".join(lines))


def _finite(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


def as_json(values: Any) -> str:
    """JSON text with non-finite floats written as null."""
    return ensure_newline(json.dumps(_finite(values), indent=2, sort_keys=False))

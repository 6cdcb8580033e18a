"""Typed field access that reports the path of the offending field."""

import math
from enum import StrEnum
from typing import Any, TypeVar

from pyDecisionGate.errors import ConfigurationError

MISSING = object()
E = TypeVar("E", bound=StrEnum)


def join(path: str, key: str | int) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    if len(path) == 0:
        return key
    return f"{path}.{key}"


def table(values: Any, path: str) -> dict:
    if not isinstance(values, dict):
        raise ConfigurationError(path, "expected a table")
    return values


def section(values: dict, key: str, path: str = "", required: bool = False) -> dict:
    if key not in values:
        if required:
            raise ConfigurationError(join(path, key), "missing section")
        return {}
    return table(values[key], join(path, key))


def array(values: dict, key: str, path: str = "", required: bool = False) -> list:
    if key not in values:
        if required:
            raise ConfigurationError(join(path, key), "missing list")
        return []
    items = values[key]
    if isinstance(items, dict):
        return [items]
    if not isinstance(items, list):
        raise ConfigurationError(join(path, key), "expected a list")
    return items


def number(values: dict, key: str, path: str, default: Any = MISSING) -> float:
    if key not in values or values[key] is None:
        if default is MISSING:
            raise ConfigurationError(join(path, key), "missing number")
        return default
    value = values[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigurationError(join(path, key), f"expected a finite number, got {value!r}")
    return float(value)


def probability(values: dict, key: str, path: str, default: Any = MISSING, allow_zero: bool = False) -> float:
    value = number(values, key, path, default)
    lower_ok = value >= 0.0 if allow_zero else value > 0.0
    if not lower_ok or value >= 1.0:
        interval = "[0, 1)" if allow_zero else "(0, 1)"
        raise ConfigurationError(join(path, key), f"expected a probability in {interval}, got {value}")
    return value


def optional_number(values: dict, key: str, path: str) -> float | None:
    return number(values, key, path, default=None)


def integer(values: dict, key: str, path: str, default: Any = MISSING) -> int:
    if key not in values:
        if default is MISSING:
            raise ConfigurationError(join(path, key), "missing integer")
        return default
    value = values[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(join(path, key), f"expected an integer, got {value!r}")
    return value


def boolean(values: dict, key: str, path: str, default: bool) -> bool:
    if key not in values:
        return default
    value = values[key]
    if not isinstance(value, bool):
        raise ConfigurationError(join(path, key), f"expected true or false, got {value!r}")
    return value


def text(values: dict, key: str, path: str, default: Any = MISSING) -> str:
    if key not in values:
        if default is MISSING:
            raise ConfigurationError(join(path, key), "missing text")
        return default
    value = values[key]
    if not isinstance(value, str) or len(value.strip()) == 0:
        raise ConfigurationError(join(path, key), f"expected non-blank text, got {value!r}")
    return value.strip()


def choice(values: dict, key: str, path: str, enum: type[E], default: E | None = None) -> E:
    if key not in values and default is not None:
        return default
    value = text(values, key, path)
    try:
        return enum(value)
    except ValueError as exc:
        allowed = "|".join(member.value for member in enum)
        raise ConfigurationError(join(path, key), f"expected one of {allowed}, got '{value}'") from exc


def matrix(values: dict, key: str, path: str) -> list[list[float]] | None:
    if key not in values:
        return None
    rows = values[key]
    field_path = join(path, key)
    if not isinstance(rows, list) or any(not isinstance(row, list) for row in rows):
        raise ConfigurationError(field_path, "expected a list of rows")
    for row_index, row in enumerate(rows):
        for col_index, value in enumerate(row):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigurationError(f"{field_path}[{row_index}][{col_index}]", "expected a number")
    return rows

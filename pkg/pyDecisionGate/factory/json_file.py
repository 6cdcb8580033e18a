import json
from pathlib import Path

from pyDecisionGate.errors import ConfigurationError


def load(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as json_file:
            values = json.load(json_file)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(str(path), f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    except OSError as exc:
        raise ConfigurationError(str(path), f"cannot read file: {exc.strerror}") from exc
    if not isinstance(values, dict):
        raise ConfigurationError(str(path), "top level must be an object")
    return values

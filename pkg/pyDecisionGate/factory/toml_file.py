import tomllib
from pathlib import Path

from pyDecisionGate.errors import ConfigurationError


def load(path: Path) -> dict:
    try:
        with open(path, "rb") as toml_file:
            return tomllib.load(toml_file)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(str(path), f"invalid TOML: {exc}") from exc
    except OSError as exc:
        raise ConfigurationError(str(path), f"cannot read file: {exc.strerror}") from exc

"""Factory module for reading experiment configurations and results from files."""

from pathlib import Path


def get(extension: str):
    if not extension.startswith("."):
        raise ValueError(f"Extension '{extension}' must start with a period")
    if extension.endswith(".toml"):
        from pyDecisionGate.factory import toml_file

        return toml_file.load
    if extension.endswith(".json"):
        from pyDecisionGate.factory import json_file

        return json_file.load
    raise ValueError(f"Unsupported extension '{extension}' for factory")


def read(path: Path) -> dict:
    load = get(path.suffix)
    return load(path)

"""Paths to the bundled robots, environments, and problem sets."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def resource_root() -> Path:
    return Path(str(resources.files("vecmp"))) / "resources"


def robot_path(name: str) -> Path:
    return resource_root() / "robots" / name


def environment_path(name: str) -> Path:
    return resource_root() / "environments" / name


def problem_set_path(name: str) -> Path:
    return resource_root() / "problems" / name

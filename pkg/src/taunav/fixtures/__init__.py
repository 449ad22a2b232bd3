"""Shipped world fixtures (JSON), addressable as ``fixture:<name>``."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def fixture_path(name: str) -> Path:
    """Filesystem path of a shipped fixture, e.g. fixture_path('straight_corridor')."""
    if not name.endswith(".json"):
        name = f"{name}.json"
    path = Path(str(resources.files(__package__).joinpath(name)))
    if not path.exists():
        raise FileNotFoundError(f"no shipped fixture named {name!r}")
    return path


def resolve_world_path(spec: str, base_dir: Path | None = None) -> Path:
    """Resolve a world reference: ``fixture:<name>`` or a filesystem path
    (relative paths resolve against base_dir when given)."""
    if spec.startswith("fixture:"):
        return fixture_path(spec.split(":", 1)[1])
    path = Path(spec)
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    return path

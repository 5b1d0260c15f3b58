"""Bundled example ontologies and situations.

``fig`` is the five-element figure ontology used throughout the docs and
tests; ``panel`` extends it with a numbered-panel description; ``mini_iraven``
and ``mini_fmnist`` are small matrix-puzzle and clothing ontologies sized for
exhaustive verification; ``iraven144`` is the 144-element matrix-puzzle
ontology used for scaling checks.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

ONTOLOGIES = ("fig", "panel", "mini_iraven", "mini_fmnist", "iraven144")


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled ontology, e.g. ``fixture_path('fig')``."""
    filename = name if name.endswith(".sandra") else f"{name}.sandra"
    path = resources.files(__package__) / filename
    if not path.is_file():
        raise FileNotFoundError(f"no bundled ontology named '{name}'")
    return Path(str(path))


def situation_path(name: str) -> Path:
    """Filesystem path of a bundled situation file, e.g. ``'s1'``."""
    filename = name if name.endswith(".json") else f"{name}.json"
    path = resources.files(__package__) / "situations" / filename
    if not path.is_file():
        raise FileNotFoundError(f"no bundled situation named '{name}'")
    return Path(str(path))

"""Access to data files shipped inside the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path


def packaged_path(*parts: str) -> Path:
    """Filesystem path of a packaged data file, e.g. packaged_path("detection_config.json")."""
    return Path(str(files("offloadsim").joinpath("data", *parts)))

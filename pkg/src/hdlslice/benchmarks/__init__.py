"""Bundled benchmark designs, stimuli and campaign configs."""

from importlib import resources
from pathlib import Path

NAMES = ("chopper_like", "spi_like")


def config_path(name: str) -> Path:
    """Path to ``<name>.cfg``; the design and stimulus sit next to it."""
    if name not in NAMES:
        raise KeyError(f"unknown benchmark {name!r}; choose from {', '.join(NAMES)}")
    return Path(str(resources.files(__name__) / f"{name}.cfg"))

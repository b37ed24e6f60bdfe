"""Line-oriented ``key = value`` campaign configuration.

Blank lines and lines starting with ``#`` are ignored. Relative paths are
resolved against the directory holding the config file. Recognised keys::

    design         path to the .mrtl source (required for most commands)
    stimulus       path to the stimulus CSV
    observation    comma-separated observed signal names
    target         fault target: "all" or comma-separated name patterns
    mode           Exhaustive | StaticPrune | DynamicPrune | DynamicLivePrune
    semantics      Transient | Persistent (defaults from the mode)
    workers        process count for the injection campaign
    seed           generator seed
    out            output directory
    refine_memory  true | false
    max_regs, max_stmts, memory, max_bits, max_cycles, max_inputs
                   random-design generator parameters
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError
from ..slicer import DEFAULT_SEMANTICS, PruneMode, Semantics
from .generator import GeneratorParams

_PATH_KEYS = {"design", "stimulus", "out"}
_INT_KEYS = {"workers", "seed", "max_regs", "max_stmts", "max_bits", "max_cycles", "max_inputs"}
_BOOL_KEYS = {"refine_memory", "memory"}
_GEN_KEYS = {"max_regs", "max_stmts", "memory", "max_bits", "max_cycles", "max_inputs"}
_ALL_KEYS = _PATH_KEYS | _INT_KEYS | _BOOL_KEYS | {"observation", "target", "mode", "semantics"}


@dataclass(frozen=True)
class CampaignConfig:
    design: Path | None = None
    stimulus: Path | None = None
    observation: tuple[str, ...] = ()
    target: str = "all"
    mode: PruneMode = PruneMode.DYNAMIC
    semantics: Semantics | None = None
    workers: int = 1
    seed: int = 0
    out: Path | None = None
    refine_memory: bool = True
    generator: GeneratorParams = field(default_factory=GeneratorParams)
    source: Path | None = None

    @property
    def effective_semantics(self) -> Semantics:
        return self.semantics if self.semantics is not None else DEFAULT_SEMANTICS[self.mode]

    def replace(self, **changes) -> CampaignConfig:
        """Copy with ``changes`` applied; ``None`` values leave a field alone."""
        changes = {k: v for k, v in changes.items() if v is not None}
        if "mode" in changes:
            changes["mode"] = _mode(changes["mode"])
        if "semantics" in changes:
            changes["semantics"] = _semantics(changes["semantics"])
        if "workers" in changes and changes["workers"] < 1:
            raise ConfigError("workers must be a positive integer")
        for key in ("design", "stimulus", "out"):
            if key in changes:
                changes[key] = Path(changes[key])
        return dataclasses.replace(self, **changes)

    def require(self, *keys: str) -> None:
        """Raise ConfigError unless every key is set (and input files exist)."""
        for key in keys:
            value = getattr(self, key)
            if value is None or value == ():
                raise ConfigError(f"config key '{key}' is required")
            if key in ("design", "stimulus") and not Path(value).is_file():
                raise ConfigError(f"{key} file not found: {value}")


def _mode(value) -> PruneMode:
    try:
        return PruneMode(value)
    except ValueError:
        choices = ", ".join(m.value for m in PruneMode)
        raise ConfigError(f"unknown mode {value!r} (expected one of {choices})") from None


def _semantics(value) -> Semantics:
    try:
        return Semantics(value)
    except ValueError:
        raise ConfigError(f"unknown semantics {value!r} (expected Transient or Persistent)") from None


def _bool(value: str, key: str) -> bool:
    low = value.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"'{key}' expects true or false, got {value!r}")


def parse_config(text: str, base_dir: Path | str = ".", source: Path | None = None) -> CampaignConfig:
    base = Path(base_dir)
    values: dict = {}
    gen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in _PATH_KEYS:
            parsed = base / value
        elif key in _INT_KEYS:
            try:
                parsed = int(value, 0)
            except ValueError:
                raise ConfigError(f"line {lineno}: '{key}' expects an integer") from None
        elif key in _BOOL_KEYS:
            parsed = _bool(value, key)
        elif key == "observation":
            parsed = tuple(n.strip() for n in value.split(",") if n.strip())
        elif key == "mode":
            parsed = _mode(value)
        elif key == "semantics":
            parsed = _semantics(value)
        else:
            parsed = value
        if key in _GEN_KEYS:
            gen[key] = parsed
        else:
            values[key] = parsed
    if values.get("workers", 1) < 1:
        raise ConfigError("workers must be a positive integer")
    try:
        params = GeneratorParams(**gen)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return CampaignConfig(generator=params, source=source, **values)


def load_config(path: Path | str) -> CampaignConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}") from None
    return parse_config(text, path.parent, source=path)

"""Experiment configuration: flag-shaped keys, optional key=value config file."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

__all__ = ["ExperimentConfig", "load_config_file", "config_from"]


@dataclass
class ExperimentConfig:
    """One experiment run; flags override file values field by field."""

    group: str = "add"
    n: int = 4
    strategy: str = "ideal"
    alpha: float = 5.7
    beta: float = 0.95
    gamma: float = 1.15
    ell: float = 1.0
    t1: float = math.inf
    t2: float = math.inf
    ancilla: int = 0
    trials: int = 1000
    seed: int = 0
    out: str = "out"
    jobs: int = 0  # 0 = one worker per CPU

    def __post_init__(self) -> None:
        if self.group not in ("add", "spin"):
            raise ValueError(f"unknown group {self.group!r} (expected add or spin)")
        if self.strategy not in ("ideal", "sem", "aem"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def as_dict(self) -> dict:
        return asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    raw = raw.strip()
    if kind in ("int", int):
        return int(raw)
    if kind in ("float", float):
        return float(raw)  # accepts "inf"
    return raw


def load_config_file(path: str | Path) -> dict:
    """Parse `key = value` lines; '#' starts a comment; unknown keys rejected."""
    out: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected `key = value`, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def config_from(file_values: dict | None, overrides: dict) -> ExperimentConfig:
    """Merge config-file values with explicit flag overrides (flags win)."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**merged)

"""Tolerances and grid settings shared by every module."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import InputError


@dataclass(frozen=True)
class Config:
    grid_n: int = 512
    tol: float = 1e-6
    eps_light: float = 1e-12
    near_lightlike: float = 1e-6
    lightlike_grid: int = 4096
    parallel_tol: float = 1e-9
    center_cap: float = 1e3
    residual_tol: float = 1e-8
    t_samples: int = 1024
    newton_maxiter: int = 50
    newton_halvings: int = 8
    cond_max: float = 1e12
    dedup_u: float = 1e-6
    dedup_c: float = 1e-6
    scan_steps: int = 200
    scan_grid: int = 128

    def replace(self, **changes: Any) -> "Config":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "Config":
        names = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(unknown)}")
        values = {}
        for key, value in data.items():
            kind = int if names[key].type in ("int", int) else float
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InputError(f"config key {key!r} must be numeric")
            if not math.isfinite(value) or value <= 0:
                raise InputError(f"config key {key!r} must be positive and finite")
            if kind is int and int(value) != value:
                raise InputError(f"config key {key!r} must be an integer")
            values[key] = kind(value)
        return cls(**values)


DEFAULT = Config()


def load_config(path: str | Path | None, overrides: Mapping[str, Any] | None = None) -> Config:
    """Defaults, then the config file, then explicit overrides (CLI flags)."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise InputError("config file must hold a JSON object")
        data.update(raw)
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    return Config.from_mapping(data)

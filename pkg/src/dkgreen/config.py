"""Run configuration: radial grids, output settings, tolerance block."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError

ENV_PREFIX = "DKGREEN_TOL_"


@dataclass(frozen=True)
class Tolerances:
    dk_identity: float = 1e-12
    oracle: float = 1e-6
    spectrum: float = 1e-12
    oracle_level: float = 1e-9
    effpot: float = 1e-12

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "Tolerances":
        """Defaults, then ``DKGREEN_TOL_<NAME>`` variables, then explicit overrides."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                try:
                    values[f.name] = float(raw)
                except ValueError:
                    raise ConfigError(f"{ENV_PREFIX}{f.name.upper()}={raw!r} is not a number", f.name)
        values.update({k: v for k, v in overrides.items() if v is not None})
        for name, v in values.items():
            if not v > 0:
                raise ConfigError(f"tolerance {name} must be positive, got {v}", name)
        return cls(**values)


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    count: int
    scale: str = "log"

    def __post_init__(self):
        if not self.min > 0:
            raise ConfigError(f"grid min must be > 0, got {self.min}", "rmin")
        if self.count < 1:
            raise ConfigError(f"grid count must be >= 1, got {self.count}", "count")
        if self.max < self.min:
            raise ConfigError(f"grid max {self.max} below min {self.min}", "rmax")
        if self.scale not in ("log", "linear"):
            raise ConfigError(f"grid scale must be log or linear, got {self.scale!r}", "scale")

    def points(self) -> list[float]:
        if self.count == 1:
            return [float(self.min)]
        if self.scale == "log":
            pts = np.geomspace(self.min, self.max, self.count)
        else:
            pts = np.linspace(self.min, self.max, self.count)
        return [float(x) for x in pts]


@dataclass
class RunConfig:
    command: str
    system: dict = field(default_factory=dict)
    grid: GridSpec | None = None
    output_format: str = "csv"
    output_path: str | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    options: dict = field(default_factory=dict)

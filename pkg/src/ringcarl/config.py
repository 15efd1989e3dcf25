"""Flat ``key = value`` run configuration shared by every subcommand."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

from .dynamics import SystemParams
from .simulate import FIELD_MODES, SimConfig

COMMANDS = ("threshold", "meanfield", "simulate", "sweep-sim")
SCANS = ("delta_c", "v")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str = "threshold"
    # physical parameters
    n_particles: int = 200
    u0: float = -0.015
    kappa: float = 1.0
    delta_c: float = -3.0
    eta: float = 0.0
    kB_T: float = 1.0
    mass: float = 10.0
    v: float = 0.0
    # simulation
    p0: float = 0.0
    dt: float | None = None
    t_end: float = 60.0
    record_every: int = 100
    seed: int = 0
    field_mode: str = "dynamic"
    # grids; a missing min/max collapses the axis to the single value above
    scan: str = "delta_c"
    delta_min: float | None = None
    delta_max: float | None = None
    delta_num: int = 1
    eta_min: float | None = None
    eta_max: float | None = None
    eta_num: int = 1
    v_min: float | None = None
    v_max: float | None = None
    v_num: int = 1
    # mean field
    r0: float = 1e-3
    iterations: int = 100
    tol: float = 1e-8
    grid_points: int = 1024
    compare_iterations: str = ""
    # output
    out: str = "-"
    jobs: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: must be one of {COMMANDS}, got {self.command!r}")
        if self.scan not in SCANS:
            raise ConfigError(f"scan: must be one of {SCANS}, got {self.scan!r}")
        if self.field_mode not in FIELD_MODES:
            raise ConfigError(f"field_mode: must be one of {FIELD_MODES}")
        for key in ("delta_num", "eta_num", "v_num"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key}: grid is empty ({getattr(self, key)} points)")
        for key in ("iterations", "jobs", "record_every"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key}: must be >= 1")
        if self.grid_points < 64:
            raise ConfigError("grid_points: must be >= 64")
        if not self.tol > 0:
            raise ConfigError("tol: must be > 0")
        if not 0 <= self.r0 <= 1:
            raise ConfigError("r0: must lie in [0, 1]")
        self.compare_list()
        try:
            self.params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def params(self) -> SystemParams:
        return SystemParams(
            n_particles=self.n_particles, u0=self.u0, kappa=self.kappa, delta_c=self.delta_c,
            eta=self.eta, kB_T=self.kB_T, mass=self.mass, v=self.v,
        )

    def sim_config(self, dt: float) -> SimConfig:
        try:
            return SimConfig(dt=dt, t_end=self.t_end, record_every=self.record_every,
                             seed=self.seed, field_mode=self.field_mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def compare_list(self) -> list[int]:
        if not self.compare_iterations.strip():
            return []
        try:
            out = [int(s) for s in self.compare_iterations.split(",")]
        except ValueError:
            raise ConfigError(f"compare_iterations: expected comma separated integers, got {self.compare_iterations!r}") from None
        if any(n < 1 for n in out):
            raise ConfigError("compare_iterations: counts must be >= 1")
        return out

    def _grid(self, prefix: str, single: float) -> np.ndarray:
        lo, hi, num = getattr(self, f"{prefix}_min"), getattr(self, f"{prefix}_max"), getattr(self, f"{prefix}_num")
        if lo is None and hi is None:
            return np.array([single])
        if lo is None or hi is None:
            raise ConfigError(f"{prefix}_min/{prefix}_max: give both or neither")
        if num > 1 and lo == hi:
            raise ConfigError(f"{prefix}: grid of {num} points needs {prefix}_min != {prefix}_max")
        return np.linspace(lo, hi, num)

    def delta_grid(self) -> np.ndarray:
        return self._grid("delta", self.delta_c)

    def eta_grid(self) -> np.ndarray:
        return self._grid("eta", self.eta)

    def v_grid(self) -> np.ndarray:
        return self._grid("v", self.v)

    def to_text(self) -> str:
        """Canonical form: one ``key = value`` per field in declaration order."""
        return "".join(f"{f.name} = {_format(getattr(self, f.name))}\n" for f in fields(self))


def _format(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str) -> Any:
    kind = _TYPES[key]
    raw = raw.strip()
    try:
        if "None" in kind:
            if raw.lower() == "none" or raw == "":
                return None
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}") from None


def parse_text(text: str, source: str = "<config>") -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def build(base: dict[str, Any] | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    merged = {**(base or {}), **(overrides or {})}
    unknown = set(merged) - set(_TYPES)
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    return RunConfig(**merged)


def load(path: str | Path | None, overrides: dict[str, Any] | None = None) -> RunConfig:
    base = parse_text(Path(path).read_text(), str(path)) if path else {}
    return build(base, overrides)


def from_text(text: str) -> RunConfig:
    return build(parse_text(text))


def replace(cfg: RunConfig, **changes) -> RunConfig:
    return dataclasses.replace(cfg, **changes)

"""Run configuration: flat ``key = value`` files with dotted section names.

Example::

    example = 1
    m = 320
    beta = 1, 10
    sampling.N = 5000
    solver.method = svd
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError


def _floats(v: str) -> tuple:
    return tuple(float(p) for p in v.replace(" ", "").split(",") if p)


def _ints(v: str) -> tuple:
    return tuple(int(p) for p in v.replace(" ", "").split(",") if p)


def _bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _opt_str(v: str) -> Optional[str]:
    v = v.strip()
    return v or None


# file key -> (RunConfig attribute, parser)
KEYS = {
    "example": ("example", int),
    "formulation": ("formulation", str),
    "m": ("m", int),
    "d": ("d", int),
    "beta": ("beta", _floats),
    "r": ("r", _floats),
    "gamma": ("gamma", float),
    "gamma.jump": ("gamma_jump", float),
    "gamma.flux": ("gamma_flux", float),
    "gamma.dirichlet": ("gamma_dirichlet", float),
    "gamma.initial": ("gamma_initial", float),
    "seed": ("seed", int),
    "trials": ("trials", int),
    "out": ("out", str),
    "sampling.N": ("N", int),
    "sampling.ratios": ("ratios", _ints),
    "sampling.seed": ("seed", int),
    "sampling.interface": ("interface_measure", str),
    "fd.h1": ("h1", float),
    "fd.h2": ("h2", float),
    "solver.method": ("solver", str),
    "solver.rcond": ("rcond", float),
    "solver.scale_columns": ("scale_columns", _bool),
    "error.rule": ("error_rule", _opt_str),
    "error.nodes": ("error_nodes", int),
    "error.mc_samples": ("mc_samples", int),
    "assembly.flux_beta": ("flux_beta", _bool),
    "dump.system": ("dump_system", _opt_str),
    "grid.resolution": ("grid_resolution", int),
    "parallel_trials": ("parallel_trials", _bool),
}


@dataclass(frozen=True)
class RunConfig:
    example: int = 1
    formulation: str = "strong"
    m: Optional[int] = None
    N: Optional[int] = None
    d: Optional[int] = None
    beta: Optional[tuple] = None
    r: Optional[tuple] = None
    ratios: Optional[tuple] = None
    gamma: float = 50.0
    gamma_jump: Optional[float] = None
    gamma_flux: Optional[float] = None
    gamma_dirichlet: Optional[float] = None
    gamma_initial: Optional[float] = None
    h1: float = 1e-6
    h2: float = 5e-4
    solver: str = "svd"
    rcond: float = 1e-12
    scale_columns: bool = True
    error_rule: Optional[str] = None  # None: the example's own rule
    error_nodes: int = 20
    mc_samples: int = 10_000
    seed: int = 0
    trials: int = 10
    out: str = "runs/latest"
    flux_beta: bool = True
    interface_measure: str = "parameter"
    dump_system: Optional[str] = None
    grid_resolution: int = 0
    parallel_trials: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        for name in ("m", "N", "d"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"{name} must be positive")
        if self.h1 <= 0 or self.h2 <= 0 or self.rcond <= 0 or self.gamma < 0:
            raise ConfigError("fd steps and rcond must be positive, gamma non-negative")
        if self.error_rule not in (None, "gauss", "mc"):
            raise ConfigError("error.rule must be 'gauss' or 'mc'")
        if self.interface_measure not in ("parameter", "arclength"):
            raise ConfigError("sampling.interface must be 'parameter' or 'arclength'")
        if self.grid_resolution != 0 and self.grid_resolution < 2:
            raise ConfigError("grid.resolution must be 0 (off) or >= 2")

    def to_items(self) -> list:
        """Round-trippable ``(key, text)`` pairs in file-key form."""
        items = []
        seen = set()
        for key, (attr, _) in KEYS.items():
            if attr in seen:
                continue
            seen.add(attr)
            v = getattr(self, attr)
            if v is None:
                continue
            if isinstance(v, tuple):
                text = ", ".join(repr(x) for x in v)
            elif isinstance(v, bool):
                text = "true" if v else "false"
            else:
                text = repr(v) if isinstance(v, float) else str(v)
            items.append((key, text))
        return items


def parse_items(pairs) -> dict:
    """Map ``(key, text)`` pairs to RunConfig keyword arguments."""
    kwargs = {}
    for key, text in pairs:
        key = key.strip()
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        attr, conv = KEYS[key]
        try:
            kwargs[attr] = conv(text.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {text!r}") from exc
    return kwargs


def read_pairs(text: str) -> list:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        k, v = line.split("=", 1)
        pairs.append((k.strip(), v.strip()))
    return pairs


def load_config(path, overrides=()) -> RunConfig:
    """Read a config file, then apply ``(key, text)`` overrides on top."""
    pairs = read_pairs(Path(path).read_text()) if path else []
    return RunConfig(**parse_items(list(pairs) + list(overrides)))


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})


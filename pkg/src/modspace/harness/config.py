"""Experiment configurations: defaults, JSON loading and validation."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

DEFAULTS: dict[str, dict[str, Any]] = {
    "young-fuzz": {"trials": 10000, "factors": [2, 3]},
    "holder-fuzz": {"trials": 10000, "factors": [2, 3]},
    "gabor-roundtrip": {"dim": 1, "L": 16, "n": 32, "sigma": 2.0, "signals": 20, "bandwidth": 8.0, "tol": 1e-9},
    "matrix-decay": {
        "L": 8,
        "ns": [16, 32, 64],
        "sigma": 2.0,
        "symbol": {"kind": "random", "seed": 3, "b": 1.0},
        "band": 2,
        "band_tol": 1e-12,
        "stability": 0.10,
    },
    "multiplier-bound": {
        "L": 16,
        "ns": [16, 32, 64, 128],
        "sigma": 2.0,
        "signals": 100,
        "bandwidth": 4.0,
        "symbols": [{"kind": "hilbert", "b": 1.0}, {"kind": "random", "seed": 1, "b": 1.0}, {"kind": "random", "seed": 2, "b": 1.0}],
        "m_grid": {"p": ["3/2", "2", "4"], "q": ["1/2", "1", "2"]},
        "w_grid": {"p": ["1/2", "1", "2"], "q": ["3/2", "2", "4"]},
        "m_endpoint": {"p": ["1"], "q": ["1/2", "1", "2"]},
        "w_endpoint": {"p": ["1/2", "1", "2"], "q": ["1"]},
        "growth": 0.10,
        "weight": None,
        "s": 1.0,
    },
    "product-oracle": {
        "L": 16,
        "n": 32,
        "sigma": 2.0,
        "oracle_tol": 1e-4,
        "symmetry_tol": 1e-10,
        "window_tol": 1e-3,
        "assoc_tol": 1e-3,
        "delta_tol": 1e-3,
        "pairing_tol": 1e-10,
        "norm_ns": [8, 16, 32],
        "norm_growth": 0.10,
        "norm_tuples": [
            {"kind": "multiply", "flavor": "M", "p": ["2", "2"], "q": ["1", "1"], "p0": "1", "q0": "1"},
            {"kind": "multiply", "flavor": "W", "p": ["1/2", "1/2"], "q": ["1", "1"], "p0": "1/4", "q0": "1"},
            {"kind": "multiply", "flavor": "W", "p": ["1/2", "1/2"], "q": ["2", "2"], "p0": "1/4", "q0": "inf"},
            {"kind": "convolve", "flavor": "M", "p": ["1", "1"], "q": ["2", "2"], "p0": "1", "q0": "1"},
            {"kind": "convolve", "flavor": "M", "p": ["1/2", "1/2"], "q": ["2", "2"], "p0": "1/2", "q0": "1"},
            {"kind": "convolve", "flavor": "W", "p": ["1/2", "1/2"], "q": ["2", "2"], "p0": "1/2", "q0": "1"},
            {"kind": "multiply", "flavor": "M", "p": ["1/2", "1/2"], "q": ["1/4", "1/4"], "p0": "1/4", "q0": "1/4", "report_only": True},
            {"kind": "convolve", "flavor": "M", "p": ["1/2", "1/2"], "q": ["1", "1"], "p0": "1/2", "q0": "1/2", "report_only": True},
        ],
    },
    "slope-membership": {
        "L": 16,
        "n": 32,
        "sigma": 2.0,
        "families": [{"family": "polynomial", "seed": 1}, {"family": "trig", "seed": 2}],
        "max_alpha": 4,
        "ns": [16, 32, 64, 128],
        "signals": 20,
        "bandwidth": 4.0,
        "exponents": [["1", "2"], ["2", "2"], ["2", "4"]],
        "growth": 0.10,
    },
}

COMMON = {"seed": 0}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    out: str | None = None

    def __getitem__(self, key: str) -> Any:
        return self.params[key]


def _same_kind(default: Any, value: Any) -> bool:
    if default is None:
        return value is None or isinstance(value, dict)
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, (int, float)):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, list):
        return isinstance(value, list)
    if isinstance(default, dict):
        return isinstance(value, dict)
    return isinstance(value, type(default))


def build(obj: dict[str, Any], seed: int | None = None, out: str | None = None) -> ExperimentConfig:
    """Validate a config mapping and merge it over the experiment's defaults."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    name = obj.get("experiment")
    if name not in DEFAULTS:
        raise ConfigError(f"unknown experiment {name!r}; known: {', '.join(DEFAULTS)}")
    params = copy.deepcopy(DEFAULTS[name])
    for key, value in obj.items():
        if key in ("experiment", "seed", "out"):
            continue
        if key not in params:
            raise ConfigError(f"{name}: unknown key {key!r}")
        if not _same_kind(params[key], value):
            raise ConfigError(f"{name}: key {key!r} has the wrong type")
        params[key] = value
    s = obj.get("seed", COMMON["seed"]) if seed is None else seed
    if not isinstance(s, int) or isinstance(s, bool) or s < 0:
        raise ConfigError("seed must be a non-negative integer")
    return ExperimentConfig(name, params, s, out if out is not None else obj.get("out"))


def load(path: str | Path, seed: int | None = None, out: str | None = None) -> ExperimentConfig:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return build(obj, seed, out)

"""YAML run configuration with defaults, validation and a stable serialization."""

from __future__ import annotations

import copy
import math
from pathlib import Path

import yaml

from .dynamics import EquationKind


class ConfigError(ValueError):
    pass


def _num(lo=None, hi=None, lo_open=False, integer=False):
    def check(name, v):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name} must be a number, got {v!r}")
        if integer and int(v) != v:
            raise ConfigError(f"{name} must be an integer, got {v!r}")
        if not math.isfinite(v):
            raise ConfigError(f"{name} must be finite")
        if lo is not None and (v <= lo if lo_open else v < lo):
            raise ConfigError(f"{name} out of range: requires {name.split('.')[-1]} {'>' if lo_open else '≥'} {lo:g}, got {v!r}")
        if hi is not None and v > hi:
            raise ConfigError(f"{name} out of range: requires {name.split('.')[-1]} ≤ {hi:g}, got {v!r}")
        return int(v) if integer else float(v)
    return check


def _list(item, nonempty=True):
    def check(name, v):
        if not isinstance(v, (list, tuple)) or (nonempty and not v):
            raise ConfigError(f"{name} must be a non-empty list")
        return [item(f"{name}[{i}]", x) for i, x in enumerate(v)]
    return check


def _choice(options):
    def check(name, v):
        if v not in options:
            raise ConfigError(f"{name} must be one of {sorted(options)}, got {v!r}")
        return v
    return check


def _even(name, v):
    v = _num(2, integer=True)(name, v)
    if v % 2:
        raise ConfigError(f"{name} must be even, got {v}")
    return v


_PROFILES = {"gaussian", "sech2", "zero"}

# section -> key -> (default, validator)
SCHEMA = {
    "run": {
        "seed": (0, _num(0, 2 ** 64 - 1, integer=True)),
        "threads": (1, _num(1, integer=True)),
    },
    "resonance": {
        "samples": (10000, _num(1, integer=True)),
        "identity_samples": (100000, _num(1, integer=True)),
        "b_ratio_samples": (100000, _num(1, integer=True)),
        "jacobian_samples": (2000, _num(1, integer=True)),
        "delta_grid": ([2.0 ** -k for k in range(11)], _list(_num(0, 1, lo_open=True))),
    },
    "evolve": {
        "kind": ("KdV", _choice({k.value for k in EquationKind})),
        "delta": (0.0, _num(0)),
        "box_length": (100.0, _num(0, lo_open=True)),
        "mode_count": (512, _even),
        "dt": (1e-3, _num(0, lo_open=True)),
        "horizon": (1.0, _num(0, lo_open=True)),
        "record_every": (50, _num(1, integer=True)),
        "dealias_fraction": (2.0 / 3.0, _num(0, 1, lo_open=True)),
        "s": (0.0, _num(0)),
        "profile": ("gaussian", _choice(_PROFILES)),
        "amplitude": (1.0, _num()),
        "width": (1.0, _num(0, lo_open=True)),
    },
    "converge": {
        "box_length": (100.0, _num(0, lo_open=True)),
        "mode_count": (512, _even),
        "dt": (1e-3, _num(0, lo_open=True)),
        "horizon": (1.0, _num(0, lo_open=True)),
        "record_every": (50, _num(1, integer=True)),
        "s": (0.0, _num(0)),
        "profile": ("gaussian", _choice(_PROFILES)),
        "amplitude": (1.0, _num()),
        "width": (1.0, _num(0, lo_open=True)),
        "delta_grid": ([2.0 ** -k for k in range(2, 9)], _list(_num(0))),
        "slack": (0.2, _num(0)),
        "final_ratio": (0.05, _num(0, lo_open=True)),
    },
    "equicont": {
        "box_length": (100.0, _num(0, lo_open=True)),
        "mode_count": (512, _even),
        "dt": (1e-3, _num(0, lo_open=True)),
        "horizon": (1.0, _num(0, lo_open=True)),
        "record_every": (50, _num(1, integer=True)),
        "s": (0.0, _num(0)),
        "profile": ("gaussian", _choice(_PROFILES)),
        "amplitude": (1.0, _num()),
        "width": (1.0, _num(0, lo_open=True)),
        "delta_grid": ([1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.0], _list(_num(0, 1))),
        "N_grid": ([1.0, 2.0, 4.0, 8.0], _list(_num(0, lo_open=True))),
        "threshold": (1e-4, _num(0, lo_open=True)),
        "max_ratio": (0.5, _num(0, lo_open=True)),
    },
    "instability": {
        "s": (0.0, _num()),
        "delta": (0.1, _num(0, 1, lo_open=True)),
        "t": (1.0, _num()),
        "theta": (0.1, _num(0, lo_open=True)),
        "N_grid": ([1e3, 1e4, 1e5, 1e6], _list(_num(0, lo_open=True))),
        "quadrature_points": (24, _num(2, integer=True)),
    },
    "fd_check": {
        "delta": (0.5, _num(0, 1, lo_open=True)),
        "t": (1.0, _num(0, lo_open=True)),
        "epsilons": ([1e-2, 5e-3, 2.5e-3], _list(_num(0, lo_open=True))),
        "dt": (2.5e-4, _num(0, lo_open=True)),
    },
}


def defaults() -> dict:
    return {sec: {k: copy.deepcopy(v[0]) for k, v in keys.items()} for sec, keys in SCHEMA.items()}


def resolve(raw: dict | None) -> dict:
    """Validate ``raw`` against the schema and fill in every default."""
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be a mapping")
    out = defaults()
    for sec, body in raw.items():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown key: {sec!r}")
        if body is None:
            continue
        if not isinstance(body, dict):
            raise ConfigError(f"section {sec!r} must be a mapping")
        for key, val in body.items():
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key: '{sec}.{key}'")
            out[sec][key] = SCHEMA[sec][key][1](f"{sec}.{key}", val)
    return out


def parse_config(path) -> dict:
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return resolve(raw)


def serialize(config: dict) -> str:
    return yaml.safe_dump(config, sort_keys=True)


def loads(text: str) -> dict:
    return resolve(yaml.safe_load(text))

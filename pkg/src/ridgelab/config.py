"""Experiment configuration: sectioned TOML (or JSON) with strict validation.

Grammar: a TOML document whose tables and keys are exactly those of
``DEFAULTS`` below. Every key is optional; values must match the type of the
default (ints are accepted where floats are expected). Keys whose default is
``None`` depend on the problem dimension and are filled in at resolution time.
Unknown tables or keys are rejected.
"""

from __future__ import annotations

import copy
import json
import sys
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError

DEFAULTS: dict[str, dict[str, Any]] = {
    "experiment": {"name": "ridgelab", "seed": 0, "output_dir": ""},
    "group": {"kind": "affine", "m": 1, "n": 8},
    "feature": {
        "pairing": "affine_theta",
        "sigma": "gaussian_d1",
        "rho": "gaussian_d1",
        "sigma_csv": "",
        "rho_csv": "",
        "psi": "random",
        "convention": "appendixA",
    },
    "target": {"name": "gaussian", "csv": ""},
    "quadrature": {
        "x_range": None, "x_points": None,
        "a_range": None, "a_points": None,
        "b_range": None, "b_points": None,
        "omega_max": 32.0, "omega_points": 2 ** 14 + 1,
    },
    "tolerances": {
        "invariance": 1e-9,
        "reconstruct": None,
        "synth": 0.05,
        "intertwine": 1e-3,
        "deep_exact": 1e-12,
        "wavelet": 0.02,
    },
    "invariance": {"n_samples": 10_000, "actions": "default"},
    "synth": {"width": 1024, "scheme": "grid_topk", "a_box": 8.0, "b_box": 16.0,
              "eval_range": [-4.0, 4.0], "eval_points": 401},
    "wavelet": {"psi": "gaussian_d2", "a_min": 0.0625, "a_max": 8.0, "scales": 33,
                "b_range": [-12.0, 12.0], "b_points": 481,
                "x_range": [-6.0, 6.0], "x_points": 481},
    "intertwine": {"n_elements": 20, "normalized": True, "transport": "interpolate"},
}

DIMENSION_DEFAULTS = {
    1: {"x_range": [-8.0, 8.0], "x_points": 401, "a_range": [-8.0, 8.0], "a_points": 201,
        "b_range": [-16.0, 16.0], "b_points": 401, "reconstruct": 0.02},
    2: {"x_range": [-6.0, 6.0], "x_points": 41, "a_range": [-5.0, 5.0], "a_points": 51,
        "b_range": [-16.0, 16.0], "b_points": 81, "reconstruct": 0.05},
    3: {"x_range": [-5.0, 5.0], "x_points": 17, "a_range": [-4.0, 4.0], "a_points": 13,
        "b_range": [-12.0, 12.0], "b_points": 33, "reconstruct": 0.10},
}

_LIST_KEYS = {"x_range", "a_range", "b_range", "eval_range"}


def _type_ok(key: str, default, value) -> bool:
    if key in _LIST_KEYS:
        return (isinstance(value, list) and len(value) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value))
    if default is None:
        # dimension-dependent: a number of the same family as the resolved defaults
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, type(default))


def validate(raw: dict) -> None:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a table of sections")
    for section, body in raw.items():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in body.items():
            if key not in DEFAULTS[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            if not _type_ok(key, DEFAULTS[section][key], value):
                raise ConfigError(f"{section}.{key} has the wrong type: {value!r}")


def parse_text(text: str, fmt: str = "toml") -> dict:
    """Parse config text; syntax errors carry line/column positions."""
    if fmt == "json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(str(exc)) from exc
    validate(raw)
    return raw


def load(path: Optional[str]) -> dict:
    if not path:
        return {}
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    fmt = "json" if p.suffix.lower() == ".json" else "toml"
    return parse_text(text, fmt)


def resolve(raw: dict, overrides: Optional[dict] = None) -> dict:
    """Merge defaults, the parsed file and command-line overrides (``{section: {key: value}}``)."""
    cfg = copy.deepcopy(DEFAULTS)
    for layer in (raw, overrides or {}):
        validate(layer)
        for section, body in layer.items():
            cfg[section].update(body)
    m = cfg["group"]["m"]
    if cfg["group"]["kind"] == "affine":
        dims = DIMENSION_DEFAULTS.get(m)
        if dims is None:
            raise ConfigError(f"group.m = {m} is not supported (use 1, 2 or 3)")
        for key in ("x_range", "x_points", "a_range", "a_points", "b_range", "b_points"):
            if cfg["quadrature"][key] is None:
                cfg["quadrature"][key] = dims[key]
        if cfg["tolerances"]["reconstruct"] is None:
            cfg["tolerances"]["reconstruct"] = dims["reconstruct"]
    elif cfg["group"]["kind"] != "cyclic":
        raise ConfigError(f"group.kind must be affine or cyclic, got {cfg['group']['kind']!r}")
    for key in ("x_points", "a_points", "b_points"):
        v = cfg["quadrature"][key]
        if v is not None and (not isinstance(v, int) or v < 1):
            raise ConfigError(f"quadrature.{key} must be a positive integer")
    return cfg

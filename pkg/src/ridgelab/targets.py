"""Built-in target functions on R^m, each with a closed form."""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .fields import Grid, SampledField


def _gaussian(pts):
    return np.exp(-0.5 * np.sum(pts * pts, axis=1))


def _gaussian_x(pts):
    return pts[:, 0] * _gaussian(pts)


def _shifted(pts):
    d = pts - 0.5
    return np.exp(-0.5 * np.sum(d * d, axis=1) / 0.8 ** 2)


def _anisotropic(pts):
    w = 1.0 + 0.5 * np.arange(pts.shape[1])
    return np.exp(-0.5 * np.sum((pts / w) ** 2, axis=1))


TARGETS = {
    "gaussian": _gaussian,
    "gaussian_x": _gaussian_x,
    "shifted": _shifted,
    "anisotropic": _anisotropic,
}


def target_function(name: str):
    try:
        return TARGETS[name]
    except KeyError:
        raise InputError(f"unknown target {name!r}; choose from {sorted(TARGETS)}") from None


def target_field(name: str, grid: Grid) -> SampledField:
    """Sample a built-in target on ``grid``; the closed form rides along as evaluator."""
    return SampledField.from_function(target_function(name), grid, target=name)

"""Hyperplane picture of the affine feature: xi(a, b) = {x : a . x - b = 0}.

The chart (u, p) with |u| = 1 is signed, so (u, p) and (-u, -p) describe the
same plane with opposite orientation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateParameterError, InputError
from .fields import Atoms
from .groups import AffineElement, affine_apply, affine_dual_apply, random_affine
from .invariants import Profile, theta

DEGENERATE_TOL = 1e-14
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Hyperplane:
    u: np.ndarray
    p: float
    source: Optional[tuple] = None  # the (a, b) it came from

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).ravel()
        if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
            raise InputError(f"normal must be a unit vector, |u| = {np.linalg.norm(u)!r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "p", float(self.p))

    @property
    def foot(self) -> np.ndarray:
        """Closest point to the origin, p u (= b a / |a|^2)."""
        return self.p * self.u

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        return np.abs(point_plane_distance(x, self)) <= tol


def hyperplane_from_params(a, b) -> Hyperplane:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    n = float(np.linalg.norm(a))
    if n <= DEGENERATE_TOL:
        raise DegenerateParameterError(f"|a| = {n:.3g}: (a, b) defines no hyperplane")
    return Hyperplane(a / n, float(b) / n, (a.copy(), float(b)))


def point_plane_distance(x, plane: Hyperplane):
    """Signed Euclidean distance u . x - p."""
    x = np.asarray(x, dtype=float)
    return x @ plane.u - plane.p


def scaled_distance(x, ab):
    """a . x - b = |a| d_E(x, xi(a, b)); the same expression as ``theta``."""
    a, b = ab
    return theta(x, a, b)


def transform_hyperplane(g: AffineElement, plane: Hyperplane) -> Hyperplane:
    """Image of the plane under x -> L x + t via the dual action on any of its (a, b)."""
    a, b = affine_dual_apply(g, plane.u, plane.p)
    return hyperplane_from_params(a, b)


def _points_on_plane(plane: Hyperplane, n: int, rng: np.random.Generator, spread: float = 3.0) -> np.ndarray:
    z = rng.normal(scale=spread, size=(n, plane.u.size))
    z -= np.outer(z @ plane.u, plane.u)
    return z + plane.foot


@dataclass(frozen=True)
class CovarianceReport:
    plane_residual: float
    distance_residual: float
    n_points: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.plane_residual <= self.tol and self.distance_residual <= self.tol

    def to_dict(self) -> dict:
        return {"plane_residual": self.plane_residual, "distance_residual": self.distance_residual,
                "n_points": self.n_points, "tol": self.tol, "pass": self.passed}


def check_hyperplane_covariance(g: AffineElement, ab, n_points: int = 100, seed: int = 0,
                                tol: float = 1e-9) -> CovarianceReport:
    """Check g . xi(a, b) = xi(g . (a, b)) on sampled plane points, plus theta invariance.

    Residuals are relative: |a' . (g y) - b'| / (|a'| (|g y| + 1)) for points y on
    the plane, and |theta(g x, g (a, b)) - theta(x, (a, b))| / (|a| (|x| + 1) + |b|)
    for off-plane x.
    """
    a, b = ab
    a = np.atleast_1d(np.asarray(a, dtype=float))
    plane = hyperplane_from_params(a, b)
    rng = np.random.default_rng(seed)
    y = _points_on_plane(plane, n_points, rng)
    gy = affine_apply(g, y)
    a2, b2 = affine_dual_apply(g, a, b)
    res = np.abs(gy @ a2 - b2) / (np.linalg.norm(a2) * (np.linalg.norm(gy, axis=1) + 1))
    x = rng.normal(scale=3.0, size=(n_points, a.size))
    d0 = theta(x, a, b)
    d1 = theta(affine_apply(g, x), a2, b2)
    scale = np.linalg.norm(a) * (np.linalg.norm(x, axis=1) + 1) + abs(b)
    return CovarianceReport(float(res.max(initial=0.0)), float((np.abs(d1 - d0) / scale).max(initial=0.0)),
                            n_points, tol)


def random_covariance_sweep(n_configs: int = 1000, m_values=(1, 2, 3), n_points: int = 10,
                            seed: int = 0) -> tuple[float, float]:
    """Worst plane and distance residuals over random (g, (a, b)) configurations."""
    rng = np.random.default_rng(seed)
    worst_p = worst_d = 0.0
    for i in range(n_configs):
        m = m_values[i % len(m_values)]
        g = random_affine(rng, m)
        a = rng.normal(size=m)
        while np.linalg.norm(a) < 0.1:
            a = rng.normal(size=m)
        b = rng.normal(scale=2.0)
        r = check_hyperplane_covariance(g, (a, b), n_points, seed=int(rng.integers(2 ** 32)))
        worst_p = max(worst_p, r.plane_residual)
        worst_d = max(worst_d, r.distance_residual)
    return worst_p, worst_d


# ---------------------------------------------------------------------------
# geometric networks


@dataclass(frozen=True)
class GeometricAtoms:
    """sum_i c_i sigma(scale_i d_E(x, (u_i, p_i)))."""

    c: np.ndarray
    scale: np.ndarray
    u: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex).ravel()
        scale = np.asarray(self.scale, dtype=float).ravel()
        u = np.atleast_2d(np.asarray(self.u, dtype=float))
        p = np.asarray(self.p, dtype=float).ravel()
        if not (c.size == scale.size == u.shape[0] == p.size):
            raise InputError("geometric atoms need matching c, scale, u, p lengths")
        if u.size and np.abs(np.linalg.norm(u, axis=1) - 1).max() > UNIT_TOL:
            raise InputError("every normal u must be a unit vector")
        for k, v in (("c", c), ("scale", scale), ("u", u), ("p", p)):
            object.__setattr__(self, k, v)

    @property
    def width(self) -> int:
        return self.c.size

    def to_json(self, path_or_buf=None) -> str:
        rows = [{"c": [float(c.real), float(c.imag)], "scale": float(s), "u": [float(v) for v in u], "p": float(p)}
                for c, s, u, p in zip(self.c, self.scale, self.u, self.p)]
        text = json.dumps(rows, indent=1)
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w") as fh:
                    fh.write(text)
        return text

    @classmethod
    def from_json(cls, src) -> "GeometricAtoms":
        if hasattr(src, "read"):
            src = src.read()
        try:
            rows = json.loads(src)
            c = [complex(r["c"][0], r["c"][1]) for r in rows]
            return cls(c, [r["scale"] for r in rows], [r["u"] for r in rows], [r["p"] for r in rows])
        except (KeyError, TypeError, IndexError, json.JSONDecodeError) as exc:
            raise InputError(f"malformed geometric atoms JSON: {exc}") from exc


def to_geometric(atoms: Atoms) -> GeometricAtoms:
    """(c, a, b) -> (c, |a|, a / |a|, b / |a|); degenerate a raises."""
    n = np.linalg.norm(atoms.a, axis=1)
    if np.any(n <= DEGENERATE_TOL):
        raise DegenerateParameterError("an atom has |a| = 0 and no hyperplane")
    return GeometricAtoms(atoms.c, n, atoms.a / n[:, None], atoms.b / n)


def from_geometric(geo: GeometricAtoms) -> Atoms:
    """(c, s, u, p) -> (c, s u, s p)."""
    return Atoms(geo.c, geo.scale[:, None] * geo.u, geo.scale * geo.p)


def geometric_network_eval(geo: GeometricAtoms, sigma: Profile, x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if geo.width == 0:
        return np.zeros(x.shape[0], dtype=complex)
    if x.shape[1] != geo.u.shape[1]:
        raise InputError("point dimension does not match the normals")
    d = x @ geo.u.T - geo.p[None, :]
    return sigma(geo.scale[None, :] * d) @ geo.c

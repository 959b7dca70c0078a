"""Sampled functions on rectangular midpoint grids and parameter distributions.

Every integral in ridgelab is a midpoint rule: an axis ``(lo, hi, n)`` is split
into ``n`` equal cells and functions are sampled at the cell centres.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import ExtrapolationError, InputError

Axis = tuple[float, float, int]


@dataclass(frozen=True)
class Grid:
    """Tensor-product midpoint grid.

    ``axes`` is a sequence of ``(lo, hi, n)`` triples. Points are enumerated in
    C order (last axis fastest).
    """

    axes: tuple[Axis, ...]

    def __post_init__(self):
        axes = tuple((float(lo), float(hi), int(n)) for lo, hi, n in self.axes)
        for lo, hi, n in axes:
            if not hi > lo or n < 1:
                raise InputError(f"bad grid axis ({lo}, {hi}, {n})")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def cube(cls, lo: float, hi: float, n: int, m: int) -> "Grid":
        return cls(((lo, hi, n),) * m)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(n for _, _, n in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacings(self) -> np.ndarray:
        return np.array([(hi - lo) / n for lo, hi, n in self.axes])

    @property
    def cell_measure(self) -> float:
        return float(np.prod(self.spacings))

    def centers(self, axis: int) -> np.ndarray:
        lo, hi, n = self.axes[axis]
        h = (hi - lo) / n
        return lo + h * (np.arange(n) + 0.5)

    @property
    def points(self) -> np.ndarray:
        """All cell centres as an ``(size, ndim)`` array."""
        mesh = np.meshgrid(*[self.centers(k) for k in range(self.ndim)], indexing="ij")
        return np.stack([c.ravel() for c in mesh], axis=-1)

    def refined(self, factor: int) -> "Grid":
        return Grid(tuple((lo, hi, n * factor) for lo, hi, n in self.axes))

    def to_index_coords(self, pts: np.ndarray) -> np.ndarray:
        """Fractional array indices of ``pts`` (shape ``(N, ndim)``), for interpolation."""
        pts = np.atleast_2d(pts)
        out = np.empty((self.ndim, pts.shape[0]))
        for k, (lo, hi, n) in enumerate(self.axes):
            h = (hi - lo) / n
            out[k] = (pts[:, k] - lo) / h - 0.5
        return out

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        ok = np.ones(pts.shape[0], dtype=bool)
        for k, (lo, hi, _) in enumerate(self.axes):
            ok &= (pts[:, k] >= lo) & (pts[:, k] <= hi)
        return ok

    def describe(self) -> list[dict]:
        return [{"lo": lo, "hi": hi, "n": n} for lo, hi, n in self.axes]


def interpolate(grid: Grid, values: np.ndarray, pts: np.ndarray, order: int = 3,
                extrapolation: str = "zero") -> np.ndarray:
    """Spline-interpolate gridded ``values`` at ``pts``.

    ``extrapolation`` is ``"zero"`` (zero-extend outside the grid box) or
    ``"fail"`` (raise :class:`ExtrapolationError`).
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    inside = grid.contains(pts)
    if extrapolation == "fail" and not inside.all():
        raise ExtrapolationError(f"{int((~inside).sum())} points outside the grid support")
    if extrapolation not in ("zero", "fail"):
        raise InputError(f"unknown extrapolation mode {extrapolation!r}")
    coords = grid.to_index_coords(pts)
    values = np.asarray(values).reshape(grid.shape)

    def _real(v):
        return ndimage.map_coordinates(v, coords, order=order, mode="constant", cval=0.0)

    if np.iscomplexobj(values):
        out = _real(values.real) + 1j * _real(values.imag)
    else:
        out = _real(values)
    return np.where(inside, out, 0.0)


@dataclass(frozen=True)
class SampledField:
    """A function on a rectangular region of R^m, sampled on a midpoint grid.

    ``evaluator`` (optional) is a vectorized closed form taking ``(N, m)``
    points. When it is present, group actions and refinements use it instead of
    interpolation.
    """

    grid: Grid
    values: np.ndarray
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values).reshape(self.grid.shape)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], grid: Grid, **meta) -> "SampledField":
        vals = np.asarray(fn(grid.points)).reshape(grid.shape)
        return cls(grid, vals, fn, dict(meta))

    @property
    def m(self) -> int:
        return self.grid.ndim

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.flat) ** 2) * self.grid.cell_measure))

    def inner(self, other: "SampledField") -> complex:
        """L2 inner product <self, other> (conjugate-linear in ``other``)."""
        if other.grid != self.grid:
            raise InputError("inner product needs fields on the same grid")
        return complex(np.sum(self.flat * np.conj(other.flat)) * self.grid.cell_measure)

    def __call__(self, pts: np.ndarray, extrapolation: str = "zero", order: int = 3) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.evaluator is not None:
            return np.asarray(self.evaluator(pts))
        return interpolate(self.grid, self.values, pts, order=order, extrapolation=extrapolation)

    def resample(self, grid: Grid) -> "SampledField":
        vals = self(grid.points)
        return SampledField(grid, vals, self.evaluator, dict(self.meta))

    def scaled(self, c: complex) -> "SampledField":
        ev = None if self.evaluator is None else (lambda p, _e=self.evaluator: c * _e(p))
        return SampledField(self.grid, c * self.values, ev, dict(self.meta))

    def boundary_ratio(self) -> float:
        """max |f| on the outermost layer of cells, relative to max |f|."""
        a = np.abs(self.values)
        peak = a.max()
        if peak == 0:
            return 0.0
        edge = 0.0
        for k in range(a.ndim):
            edge = max(edge, np.take(a, 0, axis=k).max(), np.take(a, -1, axis=k).max())
        return float(edge / peak)

    def to_csv(self, path_or_buf=None) -> str:
        """Write ``x1,...,xm,re,im`` rows (one per cell centre)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{k + 1}" for k in range(self.m)] + ["re", "im"])
        vals = self.flat.astype(complex)
        for p, v in zip(self.grid.points, vals):
            w.writerow([repr(float(c)) for c in p] + [repr(float(v.real)), repr(float(v.imag))])
        text = buf.getvalue()
        if path_or_buf is not None:
            _write_text(path_or_buf, text)
        return text

    @classmethod
    def from_csv(cls, path_or_buf) -> "SampledField":
        text = _read_text(path_or_buf)
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], [r for r in rows[1:] if r]
        if len(header) < 3 or header[-2:] != ["re", "im"]:
            raise InputError("field CSV header must be x1,...,xm,re,im")
        m = len(header) - 2
        data = np.array(body, dtype=float)
        coords = data[:, :m]
        axes = []
        for k in range(m):
            u = np.unique(coords[:, k])
            if u.size == 1:
                raise InputError("cannot infer spacing from a single sample per axis")
            h = np.diff(u)
            if not np.allclose(h, h[0], rtol=1e-9, atol=1e-12):
                raise InputError(f"axis {k + 1} is not uniformly spaced")
            axes.append((u[0] - h[0] / 2, u[-1] + h[0] / 2, u.size))
        grid = Grid(tuple(axes))
        if grid.size != data.shape[0]:
            raise InputError("CSV rows do not form a full rectangular grid")
        order = np.lexsort(coords.T[::-1])
        vals = data[order, m] + 1j * data[order, m + 1]
        if not np.any(vals.imag):
            vals = vals.real
        return cls(grid, vals.reshape(grid.shape))


def _write_text(path_or_buf, text: str) -> None:
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", newline="") as fh:
            fh.write(text)


def _read_text(path_or_buf) -> str:
    if hasattr(path_or_buf, "read"):
        return path_or_buf.read()
    with open(path_or_buf, newline="") as fh:
        return fh.read()


@dataclass(frozen=True)
class GridDistribution:
    """Parameter distribution gamma sampled on a midpoint grid over (a, b).

    The first ``m`` grid axes are the weight vector ``a``; the last axis is the
    bias ``b``. ``evaluator`` takes ``(a (N, m), b (N,))``.
    """

    grid: Grid
    values: np.ndarray
    evaluator: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.grid.ndim < 2:
            raise InputError("parameter grid needs at least one a-axis and the b-axis")
        object.__setattr__(self, "values", np.asarray(self.values).reshape(self.grid.shape))

    @classmethod
    def from_function(cls, fn, grid: Grid) -> "GridDistribution":
        pts = grid.points
        vals = np.asarray(fn(pts[:, :-1], pts[:, -1])).reshape(grid.shape)
        return cls(grid, vals, fn)

    @property
    def m(self) -> int:
        return self.grid.ndim - 1

    @property
    def weights(self) -> float:
        return self.grid.cell_measure

    def __call__(self, a: np.ndarray, b: np.ndarray, extrapolation: str = "zero") -> np.ndarray:
        a = np.atleast_2d(a)
        b = np.asarray(b, dtype=float).ravel()
        if self.evaluator is not None:
            return np.asarray(self.evaluator(a, b))
        pts = np.column_stack([a, b])
        return interpolate(self.grid, self.values, pts, extrapolation=extrapolation)

    def boundary_mass_fraction(self) -> float:
        """Share of total |gamma| mass carried by the outermost layer of cells."""
        v = np.abs(self.values)
        total = v.sum()
        if total == 0:
            return 0.0
        inner = v[tuple(slice(1, -1) for _ in range(v.ndim))].sum()
        return float((total - inner) / total)


@dataclass(frozen=True)
class Atoms:
    """Finite sum of point masses sum_i c_i delta_(a_i, b_i)."""

    c: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex).ravel()
        a = np.asarray(self.a, dtype=float)
        if a.ndim == 1:
            a = a.reshape(-1, 1) if c.size != 1 or a.size == 1 else a.reshape(1, -1)
        b = np.asarray(self.b, dtype=float).ravel()
        if not (c.shape[0] == a.shape[0] == b.shape[0]):
            raise InputError("atoms need matching counts of c, a and b")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a", a if a.ndim == 2 else a.reshape(c.shape[0], -1))
        object.__setattr__(self, "b", b)

    @classmethod
    def empty(cls, m: int) -> "Atoms":
        return cls(np.zeros(0), np.zeros((0, m)), np.zeros(0))

    @property
    def width(self) -> int:
        return self.c.shape[0]

    @property
    def m(self) -> int:
        return self.a.shape[1]

    def to_json(self, path_or_buf=None) -> str:
        items = [{"c": [float(c.real), float(c.imag)], "a": [float(v) for v in a], "b": float(b)}
                 for c, a, b in zip(self.c, self.a, self.b)]
        text = json.dumps(items, indent=1)
        if path_or_buf is not None:
            _write_text(path_or_buf, text)
        return text

    @classmethod
    def from_json(cls, src, m: Optional[int] = None) -> "Atoms":
        if isinstance(src, (list, tuple)):
            items = src
        elif isinstance(src, str) and src.lstrip().startswith("["):
            items = json.loads(src)
        else:
            items = json.loads(_read_text(src))
        if not items:
            if m is None:
                raise InputError("empty atom list needs an explicit dimension")
            return cls.empty(m)
        c = [complex(*it["c"]) for it in items]
        a = [it["a"] for it in items]
        b = [it["b"] for it in items]
        return cls(np.array(c), np.array(a, dtype=float), np.array(b))


def param_grid(a_axes: Sequence[Axis], b_axis: Axis) -> Grid:
    return Grid(tuple(a_axes) + (b_axis,))

"""Group elements, their actions on data and parameters, and regular representations.

Two families are supported: the affine group Aff(m) = GL(m) x| R^m acting on
R^m, and finite groups given by a multiplication table acting on a finite set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError, SingularityError
from .fields import Atoms, GridDistribution, SampledField, interpolate

SINGULAR_RTOL = 1e-14


@dataclass(frozen=True)
class AffineElement:
    """g = (L, t) acting by x -> L x + t."""

    L: np.ndarray
    t: np.ndarray
    det_L: float = field(init=False, repr=False)
    L_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        L = np.atleast_2d(np.asarray(self.L, dtype=float))
        t = np.atleast_1d(np.asarray(self.t, dtype=float)).ravel()
        m = L.shape[0]
        if L.shape != (m, m) or t.shape != (m,):
            raise InputError(f"affine element needs a square L and matching t, got {L.shape}, {t.shape}")
        det = abs(float(np.linalg.det(L)))
        scale = float(np.linalg.norm(L, 2)) ** m
        if not det > SINGULAR_RTOL * max(scale, 1e-300):
            raise SingularityError(f"|det L| = {det:.3g} is singular at scale {scale:.3g}")
        L.setflags(write=False)
        t.setflags(write=False)
        L_inv = np.linalg.inv(L)
        L_inv.setflags(write=False)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "det_L", det)
        object.__setattr__(self, "L_inv", L_inv)

    @property
    def m(self) -> int:
        return self.L.shape[0]

    @classmethod
    def identity(cls, m: int) -> "AffineElement":
        return cls(np.eye(m), np.zeros(m))

    @classmethod
    def translation(cls, t) -> "AffineElement":
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return cls(np.eye(t.size), t)

    def __matmul__(self, other: "AffineElement") -> "AffineElement":
        return compose(self, other)


def compose(g: AffineElement, h: AffineElement) -> AffineElement:
    """(g h) x = g (h x)."""
    return AffineElement(g.L @ h.L, g.L @ h.t + g.t)


def inverse(g: AffineElement) -> AffineElement:
    return AffineElement(g.L_inv, -g.L_inv @ g.t)


def random_affine(rng: np.random.Generator, m: int, smin: float = 0.5, smax: float = 2.0,
                  translate: bool = True) -> AffineElement:
    """Well-conditioned random affine map.

    L = Q diag(s) Q' with Haar-ish orthogonal Q, Q' and log-uniform singular
    values in [smin, smax] (so cond(L) <= smax / smin); t is standard normal.
    """
    q1, r1 = np.linalg.qr(rng.standard_normal((m, m)))
    q1 = q1 * np.sign(np.diag(r1))
    q2, r2 = np.linalg.qr(rng.standard_normal((m, m)))
    q2 = q2 * np.sign(np.diag(r2))
    s = np.exp(rng.uniform(np.log(smin), np.log(smax), size=m))
    t = rng.standard_normal(m) if translate else np.zeros(m)
    return AffineElement(q1 @ np.diag(s) @ q2, t)


def _check_points(g: AffineElement, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (g.m,) and not (g.m == 1 and x.ndim <= 1):
        raise InputError(f"point dimension {x.shape} does not match m={g.m}")
    return x


def affine_apply(g: AffineElement, x) -> np.ndarray:
    """g . x = L x + t; ``x`` may be a single point or a ``(..., m)`` stack."""
    x = _check_points(g, x)
    if g.m == 1 and (x.ndim == 0 or x.shape[-1:] != (1,)):
        return g.L[0, 0] * x + g.t[0]
    return x @ g.L.T + g.t


def affine_dual_apply(g: AffineElement, a, b) -> tuple[np.ndarray, np.ndarray]:
    """Twisted dual action g . (a, b) = (L^{-T} a, b + t . L^{-T} a).

    Leaves a . x - b invariant when x is moved by :func:`affine_apply`.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1:] != (g.m,):
        if g.m == 1:
            a = a[..., None]
            a_new = a @ g.L_inv
            return a_new[..., 0], b + a_new[..., 0] * g.t[0]
        raise InputError(f"weight dimension {a.shape} does not match m={g.m}")
    a_new = a @ g.L_inv  # row-vector form of L^{-T} a
    return a_new, b + a_new @ g.t


def affine_dual_apply_inverse(g: AffineElement, a, b) -> tuple[np.ndarray, np.ndarray]:
    """g^{-1} . (a, b) = (L^T a, b - a . t)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1:] != (g.m,) and g.m == 1:
        return a * g.L[0, 0], b - a * g.t[0]
    return a @ g.L, b - a @ g.t


def regular_action(g: AffineElement, f: SampledField, normalized: bool = True,
                   extrapolation: str = "zero", order: int = 3) -> SampledField:
    """pi_g f (x) = |det L|^{-1/2} f(g^{-1} x), sampled on f's own grid.

    Uses f's closed form when available, otherwise spline interpolation of the
    grid values (``order`` 3 by default). ``normalized=False`` drops the
    |det L|^{-1/2} factor (the plain left translate).
    """
    if f.m != g.m:
        raise InputError(f"field dimension {f.m} does not match group dimension {g.m}")
    scale = g.det_L ** -0.5 if normalized else 1.0
    g_inv = inverse(g)
    if f.evaluator is not None:
        base = f.evaluator

        def ev(pts, _base=base):
            return scale * _base(affine_apply(g_inv, np.atleast_2d(pts)))

        meta = dict(f.meta, interpolated=False)
    else:
        grid, vals = f.grid, f.values

        def ev(pts):
            y = affine_apply(g_inv, np.atleast_2d(pts))
            return scale * interpolate(grid, vals, y, order=order, extrapolation=extrapolation)

        meta = dict(f.meta, interpolated=True, interpolation_order=order)
    return SampledField(f.grid, ev(f.grid.points).reshape(f.grid.shape), ev, meta)


def dual_regular_action(g: AffineElement, gamma, normalized: bool = True,
                        extrapolation: str = "zero", order: int = 3):
    """Regular action on parameter distributions.

    Grid type: (pi^_g gamma)(a, b) = |det L|^{1/2} gamma(g^{-1} . (a, b)), resampled
    on gamma's grid. Atom type: atoms move to g . xi_i and their weights pick up
    |det L|^{-1/2}, the density factor combined with the Jacobian of the dual
    action, so that the network output transforms by :func:`regular_action`.
    """
    if isinstance(gamma, Atoms):
        if gamma.m != g.m:
            raise InputError("atom dimension does not match group dimension")
        a_new, b_new = affine_dual_apply(g, gamma.a, gamma.b)
        w = g.det_L ** -0.5 if normalized else 1.0
        return Atoms(gamma.c * w, a_new, b_new)
    if not isinstance(gamma, GridDistribution):
        raise InputError("dual_regular_action expects Atoms or a GridDistribution")
    if gamma.m != g.m:
        raise InputError("parameter grid dimension does not match group dimension")
    scale = g.det_L ** 0.5 if normalized else 1.0
    src = gamma

    def ev(a, b):
        a0, b0 = affine_dual_apply_inverse(g, np.atleast_2d(a), np.asarray(b, dtype=float).ravel())
        if src.evaluator is not None:
            return scale * src.evaluator(a0, b0)
        return scale * interpolate(src.grid, src.values, np.column_stack([a0, b0]),
                                   order=order, extrapolation=extrapolation)

    pts = gamma.grid.points
    vals = ev(pts[:, :-1], pts[:, -1])
    meta = dict(gamma.meta, interpolated=gamma.evaluator is None)
    return GridDistribution(gamma.grid, vals.reshape(gamma.grid.shape), ev, meta)


# ---------------------------------------------------------------------------
# finite groups


@dataclass(frozen=True)
class FiniteGroup:
    """Finite group on indices 0..n-1 given by its multiplication table."""

    table: np.ndarray
    name: str = ""
    n: int = field(init=False)
    identity: int = field(init=False)
    inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        tab = np.asarray(self.table, dtype=np.int64)
        n = tab.shape[0]
        if tab.shape != (n, n) or tab.min() < 0 or tab.max() >= n:
            raise InputError("multiplication table must be n x n with entries in 0..n-1")
        # associativity: (gh)k == g(hk) for all triples
        if not np.array_equal(tab[tab, :], tab[:, tab]):
            raise InputError("multiplication table is not associative")
        ids = [e for e in range(n) if np.array_equal(tab[e], np.arange(n))
               and np.array_equal(tab[:, e], np.arange(n))]
        if len(ids) != 1:
            raise InputError("multiplication table has no two-sided identity")
        e = ids[0]
        inv = np.full(n, -1)
        for g in range(n):
            hits = np.nonzero((tab[g] == e) & (tab[:, g] == e))[0]
            if hits.size != 1:
                raise InputError(f"element {g} has no two-sided inverse")
            inv[g] = hits[0]
        tab.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "identity", int(e))
        object.__setattr__(self, "inv", inv)

    def mul(self, g, h):
        return self.table[g, h]


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, name=f"Z{n}")


@dataclass(frozen=True)
class FiniteGSet:
    """A finite group acting on X = {0..size-1}; ``act[g, x]`` is g . x."""

    group: FiniteGroup
    act: np.ndarray
    size: int = field(init=False)

    def __post_init__(self):
        act = np.asarray(self.act, dtype=np.int64)
        G = self.group
        if act.ndim != 2 or act.shape[0] != G.n:
            raise InputError("action table must be |G| x |X|")
        size = act.shape[1]
        if act.min() < 0 or act.max() >= size:
            raise InputError("action table entries must index X")
        if not np.array_equal(act[G.identity], np.arange(size)):
            raise InputError("identity does not act trivially")
        # act(gh, x) == act(g, act(h, x))
        lhs = act[G.table]             # [g, h, x] -> act(gh, x)
        rhs = act[:, act]  # [g, h, x] -> act(g, act(h, x))
        if not np.array_equal(lhs, rhs):
            raise InputError("action table violates act(gh, x) = act(g, act(h, x))")
        act.setflags(write=False)
        object.__setattr__(self, "act", act)
        object.__setattr__(self, "size", size)

    @property
    def is_cyclic_translation(self) -> bool:
        """True when this is Z_n acting on itself by x -> g + x."""
        n = self.group.n
        idx = np.arange(n)
        return (self.size == n
                and np.array_equal(self.group.table, (idx[:, None] + idx[None, :]) % n)
                and np.array_equal(self.act, self.group.table))


def cyclic_gset(n: int) -> FiniteGSet:
    """Z_n acting on itself by translation."""
    G = cyclic_group(n)
    return FiniteGSet(G, G.table)


def finite_left_translate(g: int, f, S: FiniteGSet, normalized: bool = False) -> np.ndarray:
    """(pi_g f)(x) = f(g^{-1} . x); counting measure is invariant so no factor applies."""
    f = np.asarray(f)
    if f.shape[0] != S.size:
        raise InputError(f"function has {f.shape[0]} values, X has {S.size} points")
    if not 0 <= g < S.group.n:
        raise InputError(f"group index {g} out of range")
    return f[S.act[S.group.inv[g]]]


def translation_matrix(g: int, S: FiniteGSet) -> np.ndarray:
    """Permutation matrix P with P @ f == finite_left_translate(g, f, S)."""
    P = np.zeros((S.size, S.size))
    P[np.arange(S.size), S.act[S.group.inv[g]]] = 1.0
    return P


def group_right_translate(g: int, gamma, G: FiniteGroup) -> np.ndarray:
    """Regular action on functions of Xi = G under g . xi = xi g^{-1}.

    (pi^_g gamma)(xi) = gamma(g^{-1} . xi) = gamma(xi g).
    """
    gamma = np.asarray(gamma)
    if gamma.shape[0] != G.n:
        raise InputError("gamma must have one value per group element")
    return gamma[G.table[:, g]]

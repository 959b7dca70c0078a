"""Activation profiles and joint group-invariant features phi(x, xi).

A feature is a pairing between data and parameters (which is itself jointly
invariant) followed by a scalar profile. Because every shipped pairing is
invariant on its own, sums and products of features with the same pairing are
again features with the same pairing, and closure reduces to profile algebra.

Fourier convention used throughout: ``F(w) = int sigma(t) exp(-i w t) dt``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.polynomial import hermite_e

from . import groups
from .errors import InputError
from .groups import AffineElement, FiniteGSet

SQRT2PI = np.sqrt(2 * np.pi)


@dataclass(frozen=True)
class Profile:
    """Scalar activation sigma: R -> C with optional closed-form Fourier data.

    ``fourier`` is the transform on w != 0; for ``distributional`` profiles it is
    the regular part, and the point masses at w = 0 are left out (they cancel
    against partners whose transform vanishes there to high enough order).
    ``support`` is the half-width used when the transform has to be computed by
    quadrature.
    """

    kind: str
    func: Callable[[np.ndarray], np.ndarray]
    fourier: Optional[Callable[[np.ndarray], np.ndarray]] = None
    distributional: bool = False
    support: float = 40.0
    is_real: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))

    def scaled(self, s: complex) -> "Profile":
        s = complex(s)
        f, F = self.func, self.fourier
        real = self.is_real and s.imag == 0
        coef = s.real if real else s
        return Profile(
            kind=f"{coef!r}*{self.kind}",
            func=lambda t: coef * f(t),
            fourier=None if F is None else (lambda w: coef * F(w)),
            distributional=self.distributional,
            support=self.support,
            is_real=real,
        )


def _hermite_profile(n: int) -> Profile:
    # d^n/dt^n exp(-t^2/2) = (-1)^n He_n(t) exp(-t^2/2)
    coef = np.zeros(n + 1)
    coef[n] = (-1.0) ** n

    def func(t):
        return hermite_e.hermeval(t, coef) * np.exp(-0.5 * t * t)

    def fourier(w):
        w = np.asarray(w, dtype=float)
        return (1j * w) ** n * SQRT2PI * np.exp(-0.5 * w * w)

    kind = "gaussian" if n == 0 else f"gaussian_d{n}"
    return Profile(kind, func, fourier, distributional=False, support=40.0)


def _tanh() -> Profile:
    def fourier(w):
        w = np.asarray(w, dtype=float)
        with np.errstate(over="ignore"):
            return -1j * np.pi / np.sinh(0.5 * np.pi * w)
    return Profile("tanh", np.tanh, fourier, distributional=True)


def _relu() -> Profile:
    def fourier(w):
        w = np.asarray(w, dtype=float)
        return -1.0 / (w * w) + 0j
    return Profile("relu", lambda t: np.maximum(t, 0.0), fourier, distributional=True)


def _step() -> Profile:
    def fourier(w):
        w = np.asarray(w, dtype=float)
        return -1j / w
    return Profile("step", lambda t: np.heaviside(t, 0.5), fourier, distributional=True)


_BUILDERS = {
    "gaussian": lambda: _hermite_profile(0),
    "gaussian_d1": lambda: _hermite_profile(1),
    "gaussian_d2": lambda: _hermite_profile(2),
    "gaussian_d3": lambda: _hermite_profile(3),
    "gaussian_d4": lambda: _hermite_profile(4),
    "tanh": _tanh,
    "relu": _relu,
    "step": _step,
}

PROFILE_KINDS = tuple(_BUILDERS) + ("custom-table",)


def profile(kind: str) -> Profile:
    """Profile from the built-in library (see ``PROFILE_KINDS``)."""
    try:
        return _BUILDERS[kind]()
    except KeyError:
        raise InputError(f"unknown profile kind {kind!r}; known: {', '.join(_BUILDERS)}") from None


def table_profile(t, values, name: str = "custom-table") -> Profile:
    """Piecewise-linear profile through ``(t, values)``, zero outside the table."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != v.shape or t.size < 2:
        raise InputError("a profile table needs two equal-length columns with >= 2 rows")
    order = np.argsort(t)
    t, v = t[order], v[order]
    if np.any(np.diff(t) <= 0):
        raise InputError("profile table abscissae must be distinct")

    def func(x):
        return np.interp(x, t, v, left=0.0, right=0.0)

    half = float(max(abs(t[0]), abs(t[-1])))
    return Profile("custom-table", func, None, distributional=False, support=half,
                   meta={"name": name, "t_range": (float(t[0]), float(t[-1]))})


def load_profile_csv(path_or_buf) -> Profile:
    """Read a two-column ``t, sigma(t)`` CSV (an optional header row is skipped)."""
    if hasattr(path_or_buf, "read"):
        text = path_or_buf.read()
        name = "custom-table"
    else:
        with open(path_or_buf, newline="") as fh:
            text = fh.read()
        name = str(path_or_buf)
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    try:
        float(rows[0][0])
    except (ValueError, IndexError):
        rows = rows[1:]
    try:
        data = np.array([[float(r[0]), float(r[1])] for r in rows])
    except (ValueError, IndexError) as exc:
        raise InputError(f"profile table is not two numeric columns: {exc}") from None
    return table_profile(data[:, 0], data[:, 1], name=name)


def profile_sum(p: Profile, q: Profile) -> Profile:
    F = None
    if p.fourier is not None and q.fourier is not None:
        Fp, Fq = p.fourier, q.fourier
        F = lambda w: Fp(w) + Fq(w)  # noqa: E731
    fp, fq = p.func, q.func
    return Profile(f"({p.kind}+{q.kind})", lambda t: fp(t) + fq(t), F,
                   distributional=p.distributional or q.distributional,
                   support=max(p.support, q.support), is_real=p.is_real and q.is_real)


def profile_product(p: Profile, q: Profile) -> Profile:
    # the transform of a product is a convolution; no closed form is carried
    fp, fq = p.func, q.func
    return Profile(f"({p.kind}*{q.kind})", lambda t: fp(t) * fq(t), None,
                   distributional=p.distributional and q.distributional,
                   support=min(p.support, q.support), is_real=p.is_real and q.is_real)


# ---------------------------------------------------------------------------
# pairings and features

PAIRINGS = ("affine_theta", "group_compose", "group_translate")


def theta(x, a, b) -> np.ndarray:
    """Scaled signed distance a . x - b (argument order fixed as (x, xi))."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    if x.shape[-1:] != a.shape[-1:]:
        raise InputError(f"x and a dimensions differ: {x.shape} vs {a.shape}")
    return np.sum(x * a, axis=-1) - np.asarray(b, dtype=float)


@dataclass(frozen=True)
class InvariantFeature:
    """phi(x, xi) = profile(pairing(x, xi)).

    * ``affine_theta``: X = R^m, xi = (a, b), phi = sigma(a . x - b).
    * ``group_compose``: finite G acting on X, Xi = G, phi = psi(xi . x).
    * ``group_translate``: Xi = G, phi = psi(xi^{-1} . x). For a finite G-set
      ``psi`` is a table on X; for the continuous case G = Aff(1) with
      xi = (scale a > 0, shift b) and phi = psi((x - b) / a), times a^{-1/2}
      when ``unitary``.
    """

    pairing: str
    profile: Optional[Profile] = None
    psi: Optional[np.ndarray] = None
    m: Optional[int] = None
    gset: Optional[FiniteGSet] = None
    unitary: bool = False

    def __post_init__(self):
        if self.pairing not in PAIRINGS:
            raise InputError(f"unknown pairing {self.pairing!r}")
        if self.gset is not None:
            if self.psi is None:
                raise InputError("finite features need psi values on X")
            psi = np.asarray(self.psi, dtype=complex if np.iscomplexobj(self.psi) else float)
            if psi.shape != (self.gset.size,):
                raise InputError("psi must have one value per point of X")
            object.__setattr__(self, "psi", psi)
        else:
            if self.profile is None or self.m is None:
                raise InputError("continuous features need a profile and a dimension m")
            if self.pairing == "group_compose":
                raise InputError("group_compose is only defined for finite G-sets")
            if self.pairing == "group_translate" and self.m != 1:
                raise InputError("continuous group_translate is implemented on Aff(1) only")

    @property
    def is_finite(self) -> bool:
        return self.gset is not None

    def domain_key(self):
        return (self.pairing, self.m, id(self.gset) if self.gset is not None else None, self.unitary)

    def pair(self, x, xi):
        """Pairing output before the profile (theta for affine, index for finite)."""
        if self.pairing == "affine_theta":
            a, b = xi
            return theta(x, a, b)
        if self.is_finite:
            S = self.gset
            x = np.asarray(x)
            xi = np.asarray(xi)
            if self.pairing == "group_compose":
                return S.act[xi, x]
            return S.act[S.group.inv[xi], x]
        a, b = xi
        a = np.asarray(a, dtype=float)
        if np.any(a <= 0):
            raise InputError("continuous group_translate needs scales a > 0")
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] == (1,):
            x = x[..., 0]
        return (x - np.asarray(b, dtype=float)) / a

    def __call__(self, x, xi):
        u = self.pair(x, xi)
        if self.is_finite:
            return self.psi[u]
        out = self.profile(u)
        if self.pairing == "group_translate" and self.unitary:
            out = out / np.sqrt(np.asarray(xi[0], dtype=float))
        return out


def affine_feature(sigma, m: int) -> InvariantFeature:
    if isinstance(sigma, str):
        sigma = profile(sigma)
    return InvariantFeature("affine_theta", profile=sigma, m=m)


def phi_eval(phi: InvariantFeature, x, xi):
    """Evaluate phi at (x, xi); batched inputs broadcast elementwise."""
    if phi.pairing == "affine_theta":
        a = np.asarray(xi[0], dtype=float)
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x[None]
        if a.ndim == 0:
            a = a[None]
        if x.shape[-1] != phi.m or a.shape[-1] != phi.m:
            raise InputError(f"feature lives on R^{phi.m}; got x {x.shape}, a {a.shape}")
        return phi(x, (a, xi[1]))
    if phi.is_finite:
        x = np.asarray(x)
        xi = np.asarray(xi)
        if np.any((x < 0) | (x >= phi.gset.size)) or np.any((xi < 0) | (xi >= phi.gset.group.n)):
            raise InputError("finite feature arguments out of range")
    return phi(x, xi)


def _combine(p: InvariantFeature, q: InvariantFeature, op: str) -> InvariantFeature:
    if p.domain_key() != q.domain_key():
        raise InputError("features must share the pairing and domain to be combined")
    if p.is_finite:
        psi = p.psi + q.psi if op == "sum" else p.psi * q.psi
        return InvariantFeature(p.pairing, psi=psi, gset=p.gset)
    prof = profile_sum(p.profile, q.profile) if op == "sum" else profile_product(p.profile, q.profile)
    return InvariantFeature(p.pairing, profile=prof, m=p.m, unitary=p.unitary)


def invariant_sum(p: InvariantFeature, q: InvariantFeature) -> InvariantFeature:
    return _combine(p, q, "sum")


def invariant_product(p: InvariantFeature, q: InvariantFeature) -> InvariantFeature:
    return _combine(p, q, "product")


# ---------------------------------------------------------------------------
# invariance checking


class ActionPair(NamedTuple):
    """Data action ``data(g, x)`` and parameter action ``param(g, xi)`` of one group."""

    data: Callable
    param: Callable
    name: str = ""


AFFINE_ACTIONS = ActionPair(
    groups.affine_apply,
    lambda g, xi: groups.affine_dual_apply(g, xi[0], xi[1]),
    "affine/twisted-dual",
)


def _broken_dual(g: AffineElement, xi):
    a_new, b_new = groups.affine_dual_apply(g, xi[0], xi[1])
    return a_new, 2 * np.asarray(xi[1], dtype=float) - b_new


# negative control: the b-shift enters with the wrong sign
BROKEN_AFFINE_ACTIONS = ActionPair(groups.affine_apply, _broken_dual, "affine/broken")


def compose_actions(S: FiniteGSet) -> ActionPair:
    """g . x = act(g, x) and g . xi = xi g^{-1} on Xi = G."""
    G = S.group
    return ActionPair(lambda g, x: S.act[g, x], lambda g, xi: G.table[xi, G.inv[g]], "finite/right")


def translate_actions(S: FiniteGSet) -> ActionPair:
    """g . x = act(g, x) and g . xi = g xi on Xi = G."""
    G = S.group
    return ActionPair(lambda g, x: S.act[g, x], lambda g, xi: G.table[g, xi], "finite/left")


def _affine1_left(g: AffineElement, xi):
    # xi = (a, b) is the map x -> a x + b; g . xi = g o xi
    a, b = np.asarray(xi[0], dtype=float), np.asarray(xi[1], dtype=float)
    return g.L[0, 0] * a, g.L[0, 0] * b + g.t[0]


AFFINE1_TRANSLATE_ACTIONS = ActionPair(groups.affine_apply, _affine1_left, "aff1/left")


def default_actions(phi: InvariantFeature) -> ActionPair:
    if phi.pairing == "affine_theta":
        return AFFINE_ACTIONS
    if phi.is_finite:
        return compose_actions(phi.gset) if phi.pairing == "group_compose" else translate_actions(phi.gset)
    return AFFINE1_TRANSLATE_ACTIONS


def affine_sampler(m: int, positive_scale: bool = False):
    """Sampler of (g, x, xi) batches: one conditioned g with k standard normal x, a, b."""

    def sample(rng: np.random.Generator, k: int = 1):
        if positive_scale:
            # Aff(1) with a > 0 (orientation preserving), as used by the voice pairing
            g = AffineElement(np.exp(rng.uniform(np.log(0.5), np.log(2.0))), rng.standard_normal())
            return g, rng.standard_normal((k, 1)), (np.exp(rng.uniform(-1, 1, k)), rng.standard_normal(k))
        g = groups.random_affine(rng, m)
        return g, rng.standard_normal((k, m)), (rng.standard_normal((k, m)), rng.standard_normal(k))

    return sample


@dataclass(frozen=True)
class InvarianceReport:
    max_abs_deviation: float
    max_rel_deviation: float
    n_samples: int
    tol: float
    exhaustive: bool
    passed: bool
    actions: str = ""

    def to_dict(self) -> dict:
        return {
            "max_abs_dev": self.max_abs_deviation,
            "max_rel_dev": self.max_rel_deviation,
            "n_samples": self.n_samples,
            "tol": self.tol,
            "exhaustive": self.exhaustive,
            "pass": self.passed,
            "actions": self.actions,
        }


def check_joint_invariance(phi: InvariantFeature, actions: Optional[ActionPair] = None,
                           sampler: Optional[Callable] = None, n_samples: int = 10_000,
                           tol: float = 1e-9, rng: Optional[np.random.Generator] = None,
                           batch: int = 50) -> InvarianceReport:
    """Compare phi(g . x, g . xi) with phi(x, xi).

    Finite G-sets are checked exhaustively over all (g, x, xi). Continuous
    features are sampled, one group element per ``batch`` of (x, xi) pairs; the relative deviation is normwise, i.e. the largest
    absolute deviation divided by the largest |phi| seen over the sample.
    """
    actions = actions or default_actions(phi)
    if phi.is_finite:
        S = phi.gset
        g, x, xi = np.meshgrid(np.arange(S.group.n), np.arange(S.size), np.arange(S.group.n), indexing="ij")
        g, x, xi = g.ravel(), x.ravel(), xi.ravel()
        lhs = phi(actions.data(g, x), actions.param(g, xi))
        rhs = phi(x, xi)
        dev = np.abs(lhs - rhs)
        scale = max(np.abs(rhs).max(), np.finfo(float).tiny)
        max_abs = float(dev.max())
        max_rel = float(max_abs / scale)
        return InvarianceReport(max_abs, max_rel, int(dev.size), tol, True, max_rel <= tol, actions.name)

    rng = rng if rng is not None else np.random.default_rng(0)
    if sampler is None:
        sampler = affine_sampler(phi.m, positive_scale=phi.pairing == "group_translate")
    lhs = np.empty(n_samples, dtype=complex)
    rhs = np.empty(n_samples, dtype=complex)
    for i in range(0, n_samples, batch):
        k = min(batch, n_samples - i)
        g, x, xi = sampler(rng, k)
        lhs[i:i + k] = phi(actions.data(g, x), actions.param(g, xi))
        rhs[i:i + k] = phi(x, xi)
    dev = np.abs(lhs - rhs)
    scale = max(np.abs(rhs).max(), np.finfo(float).tiny)
    max_abs = float(dev.max())
    max_rel = float(max_abs / scale)
    return InvarianceReport(max_abs, max_rel, n_samples, tol, False, bool(max_rel <= tol), actions.name)

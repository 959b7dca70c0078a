"""1-D Fourier data of profiles and the spectral pairing <<sigma, rho>>.

The pairing is ``int F_sigma(w) conj(F_rho(w)) |w|^{-m} dw`` (``"thm1"``), or the
same integral times ``(2 pi)^(m-1)`` (``"appendixA"``). Which of the two is the
actual constant of the reconstruction formula for our Fourier convention is a
measured quantity (see ``transforms.reconstruct``); nothing here decides it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AdmissibilityError, CalibrationError, InputError, UnsupportedError
from .invariants import Profile

CONVENTIONS = ("thm1", "appendixA")

OMEGA_MAX = 32.0
OMEGA_POINTS = 2 ** 14 + 1
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class FourierProfile:
    omega: np.ndarray
    values: np.ndarray
    source: str  # "closed_form" | "numeric_quadrature"


def numeric_fourier(p: Profile, omega, n_t: int = 4096, chunk: int = 2048) -> np.ndarray:
    """Midpoint quadrature of int sigma(t) e^{-i w t} dt over [-support, support]."""
    if p.distributional:
        raise UnsupportedError(f"{p.kind} is distributional; its transform has no quadrature")
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    T = p.support
    lo, hi = p.meta.get("t_range", (-T, T))
    h = (hi - lo) / n_t
    t = lo + h * (np.arange(n_t) + 0.5)
    s = p(t) * h
    out = np.empty(omega.shape, dtype=complex)
    flat = omega.ravel()
    res = out.reshape(-1)
    for i in range(0, flat.size, chunk):
        w = flat[i:i + chunk]
        res[i:i + chunk] = np.exp(-1j * np.outer(w, t)) @ s
    return out


def fourier_values(p: Profile, omega) -> np.ndarray:
    """Closed form when the profile carries one, otherwise quadrature."""
    if p.fourier is not None:
        return np.asarray(p.fourier(np.asarray(omega, dtype=float)), dtype=complex)
    return numeric_fourier(p, omega)


def fourier1d(p: Profile, omega_max: float = 8.0, n_points: int = 257, source: str = "auto") -> FourierProfile:
    """Sample F_sigma on a symmetric grid of ``n_points`` nodes over [-omega_max, omega_max]."""
    omega = np.linspace(-omega_max, omega_max, n_points)
    if source == "auto":
        source = "closed_form" if p.fourier is not None else "numeric_quadrature"
    if source == "closed_form":
        if p.fourier is None:
            raise UnsupportedError(f"{p.kind} has no closed-form transform")
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(p.fourier(omega), dtype=complex)
    elif source == "numeric_quadrature":
        vals = numeric_fourier(p, omega)
    else:
        raise InputError(f"unknown Fourier source {source!r}")
    return FourierProfile(omega, vals, source)


# ---------------------------------------------------------------------------
# spectral integration


def vanishing_order(fn: Callable[[np.ndarray], np.ndarray], w1: float = 1e-4, w2: float = 1e-3) -> float:
    """Power p with |fn(w)| ~ K |w|^p as w -> 0, estimated from two small |w| on both sides."""
    w = np.array([w1, w2, -w1, -w2])
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        v = np.abs(np.asarray(fn(w)))
    if not np.all(np.isfinite(v)):
        return -np.inf
    slopes = []
    for lo, hi in ((v[0], v[1]), (v[2], v[3])):
        if lo == 0 and hi == 0:
            slopes.append(np.inf)
        elif lo == 0 or hi == 0:
            slopes.append(np.inf if lo == 0 else -np.inf)
        else:
            slopes.append(np.log(hi / lo) / np.log(w2 / w1))
    return float(min(slopes))


@dataclass(frozen=True)
class SpectralIntegral:
    value: complex
    order: float
    excluded_cell_bound: float
    n_eval: int


def integrate_spectrum(fn: Callable[[np.ndarray], np.ndarray], omega_max: float = OMEGA_MAX,
                       n_points: int = OMEGA_POINTS, sides: str = "both",
                       n_geometric: int = 48) -> SpectralIntegral:
    """Integrate fn over [-omega_max, omega_max] excluding a vanishing cell at 0.

    The node grid of ``n_points`` points defines cells of width h centred on
    the nodes. Every cell except the one at 0 gets 8-point Gauss-Legendre. The
    central half cells [0, h/2] are split geometrically down to
    eps = (h/2) 2^-n_geometric; the leftover [-eps, eps] is excluded and bounded
    by K eps^(p+1) / (p+1) per side from the estimated local power p.
    """
    if n_points < 3 or n_points % 2 == 0:
        raise InputError("omega grid needs an odd number (>= 3) of points")
    p = vanishing_order(fn)
    if not p > -1 + 0.25:
        raise AdmissibilityError(
            f"integrand behaves like |w|^{p:.2f} at w = 0 and is not absolutely integrable")
    h = 2 * omega_max / (n_points - 1)
    k = np.arange(1, (n_points - 1) // 2 + 1)
    lo = (k - 0.5) * h
    edges = [np.column_stack([lo, lo + h])]
    j = np.arange(n_geometric)
    edges.append(np.column_stack([0.5 * h * 2.0 ** (-j - 1), 0.5 * h * 2.0 ** (-j)]))
    panels = np.vstack(edges)
    mid = panels.mean(axis=1, keepdims=True)
    rad = 0.5 * (panels[:, 1] - panels[:, 0])[:, None]
    nodes = (mid + rad * _GL_X).ravel()
    weights = (rad * _GL_W).ravel()
    eps = 0.5 * h * 2.0 ** (-n_geometric)
    total = 0j
    bound = 0.0
    count = 0
    for sign in ((1.0, -1.0) if sides == "both" else ((1.0,) if sides == "positive" else (-1.0,))):
        with np.errstate(over="ignore", under="ignore"):
            vals = np.asarray(fn(sign * nodes), dtype=complex)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        total += np.sum(vals * weights)
        count += nodes.size
        K = abs(complex(fn(np.array([sign * eps]))[0])) / eps ** p if np.isfinite(p) else 0.0
        bound += K * eps ** (p + 1) / (p + 1) if np.isfinite(p) else 0.0
    return SpectralIntegral(complex(total), p, float(bound), count)


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise InputError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def prefactor(m: int, convention: str) -> float:
    _check_convention(convention)
    return (2 * np.pi) ** (m - 1) if convention == "appendixA" else 1.0


@dataclass(frozen=True)
class BilinearResult:
    value: complex
    admissible: bool
    excluded_cell_bound: float
    order: float
    convention: str
    m: int

    def to_dict(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "admissible": self.admissible,
                "excluded_cell_bound": self.excluded_cell_bound}


def spectral_pairing(sigma: Profile, rho: Profile, m: int, convention: str = "thm1",
                     omega_max: float = OMEGA_MAX, n_points: int = OMEGA_POINTS) -> BilinearResult:
    """<<sigma, rho>> with its admissibility diagnostics.

    Admissible means the integrand F_sigma conj(F_rho) |w|^{-m} vanishes (or
    blows up) at 0 slower than |w|^{-1}, checked numerically from the
    profiles' transforms. Raises :class:`AdmissibilityError` otherwise.
    """
    _check_convention(convention)
    if not 1 <= m <= 3:
        raise InputError("dimension m must be 1, 2 or 3")
    Fs = sigma.fourier if sigma.fourier is not None else (lambda w: numeric_fourier(sigma, w))
    Fr = rho.fourier if rho.fourier is not None else (lambda w: numeric_fourier(rho, w))

    def integrand(w):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return Fs(w) * np.conj(Fr(w)) * np.abs(w) ** (-float(m))

    res = integrate_spectrum(integrand, omega_max=omega_max, n_points=n_points)
    c = prefactor(m, convention)
    return BilinearResult(c * res.value, True, c * res.excluded_cell_bound, res.order, convention, m)


def bilinear_form(sigma: Profile, rho: Profile, m: int, convention: str = "thm1", **kw) -> complex:
    return spectral_pairing(sigma, rho, m, convention, **kw).value


def is_admissible(sigma: Profile, rho: Profile, m: int) -> bool:
    try:
        val = bilinear_form(sigma, rho, m)
    except AdmissibilityError:
        return False
    return val != 0


def calibrate_rho(sigma: Profile, m: int, base: Profile, convention: str = "thm1",
                  zero_tol: float = 1e-10) -> tuple[Profile, complex]:
    """Rescale ``base`` so that <<sigma, rho>> = 1.

    The pairing is conjugate-linear in rho, so rho = s base with s = 1 / conj(<<sigma, base>>).
    """
    v = bilinear_form(sigma, base, m, convention)
    ref = integrate_spectrum(
        lambda w: np.abs(_safe(sigma, w) * np.conj(_safe(base, w))) * np.abs(w) ** (-float(m)))
    if abs(v) <= zero_tol * max(abs(ref.value) * prefactor(m, convention), 1e-300):
        raise CalibrationError(
            f"<<{sigma.kind}, {base.kind}>> vanishes (|value| = {abs(v):.3g}); pick a base of the other parity")
    s = 1.0 / np.conj(v)
    return base.scaled(s), complex(s)


def _safe(p: Profile, w):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return fourier_values(p, w)

"""Deep ridgelet features psi(xi(x)) on a finite group acting on a finite set.

Parameters are group elements xi (hidden-layer maps), so every integral over
the parameter domain is a finite sum with counting measure. On Z_n acting on
itself the composite kernel NN o R is circulant and its scalar on the k-th
character line is |dft(psi)[k]|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, UnsupportedError
from .groups import FiniteGSet, cyclic_gset, translation_matrix
from .invariants import InvariantFeature


@dataclass(frozen=True)
class DeepFeature:
    """phi(x, xi) = psi(xi . x) with the dual action g . xi = xi g^{-1}."""

    gset: FiniteGSet
    psi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        if psi.shape != (self.gset.size,):
            raise InputError(f"psi needs {self.gset.size} values, got shape {psi.shape}")
        object.__setattr__(self, "psi", psi)

    @property
    def table(self) -> np.ndarray:
        """Phi[xi, x] = psi(xi . x)."""
        return self.psi[self.gset.act]

    def feature(self) -> InvariantFeature:
        return InvariantFeature("group_compose", psi=self.psi, gset=self.gset)

    def __call__(self, x, xi):
        return self.psi[self.gset.act[np.asarray(xi), np.asarray(x)]]


def cyclic_feature(n: int, psi) -> DeepFeature:
    return DeepFeature(cyclic_gset(n), psi)


def named_psi(name: str, n: int, seed: int = 0) -> np.ndarray:
    """``delta0``, ``ones`` or ``random`` (complex Gaussian, unit expected norm)."""
    if name == "delta0":
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1.0
        return psi
    if name == "ones":
        return np.ones(n, dtype=complex)
    if name == "random":
        rng = np.random.default_rng(seed)
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2 * n)
    raise InputError(f"unknown psi {name!r}; choose delta0, ones or random")


def _check_len(v, n: int, what: str) -> np.ndarray:
    v = np.asarray(v)
    if v.shape != (n,):
        raise InputError(f"{what} must have {n} entries, got shape {v.shape}")
    return v


def deep_nn_apply(gamma, D: DeepFeature, x=None):
    """NN[gamma](x) = sum_xi gamma(xi) psi(xi . x); all of X when ``x`` is None."""
    gamma = _check_len(gamma, D.gset.group.n, "gamma")
    out = gamma @ D.table
    return out if x is None else out[np.asarray(x)]


def deep_ridgelet(f, D: DeepFeature) -> np.ndarray:
    """R[f](xi) = sum_x f(x) conj(psi(xi . x))."""
    f = _check_len(f, D.gset.size, "f")
    return np.conj(D.table) @ f


def composite_kernel(D: DeepFeature) -> np.ndarray:
    """Matrix of NN o R: K[x, x'] = sum_xi psi(xi . x) conj(psi(xi . x'))."""
    T = D.table
    return T.T @ np.conj(T)


def duality_deviation(gamma, f, D: DeepFeature) -> float:
    """|<gamma, R[f]> - <NN[gamma], f>| with counting measures on both sides."""
    lhs = np.sum(np.asarray(gamma) * np.conj(deep_ridgelet(f, D)))
    rhs = np.sum(deep_nn_apply(gamma, D) * np.conj(np.asarray(f)))
    return float(abs(lhs - rhs))


def commutator_norm(D: DeepFeature) -> float:
    """max_g ||K P_g - P_g K|| over the left translations P_g of X."""
    K = composite_kernel(D)
    dev = 0.0
    for g in range(D.gset.group.n):
        P = translation_matrix(g, D.gset)
        dev = max(dev, float(np.abs(K @ P - P @ K).max()))
    return dev


@dataclass(frozen=True)
class IsotypicScalar:
    k: int
    scalar: complex
    deviation: float
    dft_power: float


def isotypic_scalars(D: DeepFeature) -> list[IsotypicScalar]:
    """Scalar of NN o R on each character line e_k(x) = exp(2 pi i k x / n) / sqrt(n).

    Only defined for Z_n acting on itself by translation. Zero scalars are
    reported as they are, without filtering.
    """
    if not D.gset.is_cyclic_translation:
        raise UnsupportedError("isotypic projection is implemented for Z_n acting on itself only")
    n = D.gset.size
    K = composite_kernel(D)
    x = np.arange(n)
    power = np.abs(np.fft.fft(D.psi)) ** 2
    out = []
    for k in range(n):
        e = np.exp(2j * np.pi * k * x / n) / np.sqrt(n)
        Ke = K @ e
        lam = complex(np.vdot(e, Ke))
        dev = float(np.linalg.norm(Ke - lam * e))
        out.append(IsotypicScalar(k, lam, dev, float(power[k])))
    return out


def deep_exact_report(n: int, psi: str = "random", seed: int = 0) -> dict:
    D = cyclic_feature(n, named_psi(psi, n, seed))
    scal = isotypic_scalars(D)
    lam = np.array([s.scalar for s in scal])
    power = np.array([s.dft_power for s in scal])
    dft_dev = float(np.abs(lam - power).max())
    return {
        "lambdas": [float(v) for v in lam.real],
        "lambdas_imag_max": float(np.abs(lam.imag).max()),
        "max_deviation": max(s.deviation for s in scal),
        "dft_match": bool(dft_dev <= 1e-12),
        "dft_deviation": dft_dev,
        "commutator": commutator_norm(D),
        "n": n,
        "psi": psi,
        "seed": seed,
    }

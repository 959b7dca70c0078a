"""Invariant-feature networks NN[gamma; phi], ridgelet transforms R[f; phi] and checks.

All integrals are midpoint rules on the grids carried by the inputs. The affine
pairing has a fast path for tensor grids over (a, b): a . x is formed once per
block of weight vectors and the bias axis is swept.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import groups
from .errors import AdmissibilityError, InputError
from .fields import Atoms, Grid, GridDistribution, SampledField, param_grid
from .groups import AffineElement
from .invariants import InvariantFeature, Profile, affine_feature
from .spectrum import CONVENTIONS, bilinear_form, spectral_pairing

_BLOCK = 1 << 22  # max entries of a kernel block held in memory

DEFAULT_X_GRIDS = {
    1: Grid(((-8.0, 8.0, 401),)),
    2: Grid.cube(-6.0, 6.0, 41, 2),
}
DEFAULT_XI_GRIDS = {
    1: param_grid([(-8.0, 8.0, 201)], (-16.0, 16.0, 401)),
    2: param_grid([(-5.0, 5.0, 51)] * 2, (-16.0, 16.0, 81)),
}
BOUNDARY_MASS_TOL = 1e-3
DECAY_TOL = 1e-6
IMAG_TOL = 1e-10


class NyquistWarning(UserWarning):
    """The data grid is too coarse for the oscillation scale of some feature."""


def default_x_grid(m: int) -> Grid:
    try:
        return DEFAULT_X_GRIDS[m]
    except KeyError:
        raise InputError(f"no default data grid for m={m}") from None


def default_xi_grid(m: int) -> Grid:
    try:
        return DEFAULT_XI_GRIDS[m]
    except KeyError:
        raise InputError(f"no default parameter grid for m={m}") from None


def _matvec(K: np.ndarray, v: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(v) and not np.iscomplexobj(K):
        return K @ v.real + 1j * (K @ v.imag)
    return K @ v


def _vecmat(v: np.ndarray, K: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(v) and not np.iscomplexobj(K):
        return v.real @ K + 1j * (v.imag @ K)
    return v @ K


def _prof(p: Profile, t: np.ndarray, conj: bool) -> np.ndarray:
    out = p(t)
    return np.conj(out) if conj and not p.is_real else out


def _affine_ridgelet_tensor(wf, X, a_pts, b_pts, p: Profile) -> np.ndarray:
    """R[j, k] = sum_x wf[x] conj(p(a_j . x - b_k))."""
    out = np.empty((a_pts.shape[0], b_pts.size), dtype=complex)
    rows = max(1, _BLOCK // max(X.shape[0], 1))
    for i in range(0, a_pts.shape[0], rows):
        P = a_pts[i:i + rows] @ X.T
        for k, b in enumerate(b_pts):
            out[i:i + rows, k] = _matvec(_prof(p, P - b, True), wf)
    return out


def _affine_network_tensor(wg, X, a_pts, b_pts, p: Profile) -> np.ndarray:
    """out[x] = sum_{j,k} wg[j, k] p(a_j . x - b_k)."""
    out = np.zeros(X.shape[0], dtype=complex)
    rows = max(1, _BLOCK // max(X.shape[0], 1))
    for i in range(0, a_pts.shape[0], rows):
        P = a_pts[i:i + rows] @ X.T
        for k, b in enumerate(b_pts):
            out += _vecmat(wg[i:i + rows, k], _prof(p, P - b, False))
    return out


def _affine_ridgelet_pairs(wf, X, a, b, p: Profile) -> np.ndarray:
    out = np.empty(a.shape[0], dtype=complex)
    rows = max(1, _BLOCK // max(X.shape[0], 1))
    for i in range(0, a.shape[0], rows):
        T = a[i:i + rows] @ X.T - b[i:i + rows, None]
        out[i:i + rows] = _matvec(_prof(p, T, True), wf)
    return out


def _affine_network_pairs(c, X, a, b, p: Profile) -> np.ndarray:
    out = np.zeros(X.shape[0], dtype=complex)
    rows = max(1, _BLOCK // max(X.shape[0], 1))
    for i in range(0, a.shape[0], rows):
        T = a[i:i + rows] @ X.T - b[i:i + rows, None]
        out += _vecmat(c[i:i + rows], _prof(p, T, False))
    return out


def _generic_pairs(phi: InvariantFeature, X, xi, weights, over: str, conj: bool) -> np.ndarray:
    """Brute-force sums for pairings without a fast path (continuous group_translate)."""
    a = np.asarray(xi[0], dtype=float).ravel()
    b = np.asarray(xi[1], dtype=float).ravel()
    x = X[:, 0]
    rows = max(1, _BLOCK // max(x.size, 1))
    if over == "x":
        out = np.empty(a.size, dtype=complex)
        for i in range(0, a.size, rows):
            K = phi(x[None, :], (a[i:i + rows, None], b[i:i + rows, None]))
            K = np.conj(K) if conj else K
            out[i:i + rows] = _matvec(K, weights)
        return out
    out = np.zeros(x.size, dtype=complex)
    for i in range(0, a.size, rows):
        K = phi(x[None, :], (a[i:i + rows, None], b[i:i + rows, None]))
        out += _vecmat(weights[i:i + rows], K)
    return out


def _check_feature(phi: InvariantFeature, m: int) -> None:
    if phi.is_finite:
        raise InputError("finite-group features are handled by ridgelab.deepexact")
    if phi.m != m:
        raise InputError(f"feature lives on R^{phi.m}, data on R^{m}")


def nyquist_messages(a_max: float, spacing: np.ndarray) -> list[str]:
    h = float(np.max(spacing))
    if a_max * h > np.pi:
        return [f"nyquist: max|a| * dx = {a_max * h:.3g} > pi; the data grid under-resolves the features"]
    return []


def _split_xi(xi, m: int):
    a = np.asarray(xi[0], dtype=float)
    b = np.asarray(xi[1], dtype=float)
    single = b.ndim == 0
    a = a.reshape(-1, m)
    b = b.reshape(-1)
    if a.shape[0] != b.shape[0]:
        raise InputError("need one bias per weight vector")
    return a, b, single


# ---------------------------------------------------------------------------
# the two transforms


def ridgelet_apply(f: SampledField, phi: InvariantFeature, xi):
    """R[f; phi](xi) = int f(x) conj(phi(x, xi)) dx by midpoint quadrature on f's grid.

    ``xi`` is ``(a, b)``: a single pair returns a scalar, stacked pairs an array.
    For the continuous translate pairing ``xi = (scale, shift)``.
    """
    _check_feature(phi, f.m)
    X = f.grid.points
    wf = f.flat * f.grid.cell_measure
    if phi.pairing == "affine_theta":
        a, b, single = _split_xi(xi, f.m)
        for msg in nyquist_messages(float(np.abs(a).max(initial=0.0)), f.grid.spacings):
            warnings.warn(msg, NyquistWarning, stacklevel=2)
        out = _affine_ridgelet_pairs(wf, X, a, b, phi.profile)
    else:
        single = np.ndim(xi[1]) == 0
        out = _generic_pairs(phi, X, xi, wf, "x", conj=True)
    return complex(out[0]) if single else out


def ridgelet_transform(f: SampledField, phi: InvariantFeature, xi_grid: Optional[Grid] = None) -> GridDistribution:
    """R[f; phi] sampled on a tensor grid over (a, b); grid-type result, no closed form."""
    _check_feature(phi, f.m)
    if phi.pairing != "affine_theta":
        raise InputError("tensor-grid ridgelet transforms need the affine pairing")
    xi_grid = xi_grid or default_xi_grid(f.m)
    if xi_grid.ndim != f.m + 1:
        raise InputError("parameter grid must have m weight axes and one bias axis")
    a_grid = Grid(xi_grid.axes[:-1])
    a_pts = a_grid.points
    b_pts = xi_grid.centers(xi_grid.ndim - 1)
    wf = f.flat * f.grid.cell_measure
    vals = _affine_ridgelet_tensor(wf, f.grid.points, a_pts, b_pts, phi.profile)
    msgs = nyquist_messages(float(np.abs(a_pts).max()), f.grid.spacings)
    return GridDistribution(xi_grid, vals.reshape(xi_grid.shape), None, {"warnings": msgs})


def nn_apply(gamma, phi: InvariantFeature, x):
    """NN[gamma; phi](x) = int gamma(xi) phi(x, xi) dxi.

    Grid-type gamma: midpoint sum with the cell measure as weight. Atom-type
    gamma: sum_i c_i phi(x, xi_i). ``x`` is a point or an ``(N, m)`` stack.
    """
    if phi.is_finite:
        raise InputError("finite-group features are handled by ridgelab.deepexact")
    m = phi.m
    xs = np.asarray(x, dtype=float)
    single = xs.ndim == 0 if m == 1 else xs.ndim == 1
    X = xs.reshape(-1, m)
    if isinstance(gamma, Atoms):
        if gamma.m != m:
            raise InputError("atom dimension does not match the feature")
        if gamma.width == 0:
            out = np.zeros(X.shape[0], dtype=complex)
        elif phi.pairing == "affine_theta":
            out = _affine_network_pairs(gamma.c, X, gamma.a, gamma.b, phi.profile)
        else:
            out = _generic_pairs(phi, X, (gamma.a[:, 0], gamma.b), gamma.c, "xi", conj=False)
    elif isinstance(gamma, GridDistribution):
        if gamma.m != m:
            raise InputError("parameter grid dimension does not match the feature")
        if phi.pairing != "affine_theta":
            raise InputError("grid-type distributions need the affine pairing")
        grid = gamma.grid
        a_pts = Grid(grid.axes[:-1]).points
        b_pts = grid.centers(grid.ndim - 1)
        wg = gamma.values.reshape(a_pts.shape[0], b_pts.size) * grid.cell_measure
        out = _affine_network_tensor(wg, X, a_pts, b_pts, phi.profile)
    else:
        raise InputError("gamma must be Atoms or a GridDistribution")
    return complex(out[0]) if single else out


def finite_network_eval(atoms: Atoms, phi: InvariantFeature, x):
    """sum_i c_i phi(x, xi_i); the atom branch of :func:`nn_apply`."""
    if not isinstance(atoms, Atoms):
        raise InputError("finite_network_eval needs Atoms")
    return nn_apply(atoms, phi, x)


# ---------------------------------------------------------------------------
# reconstruction


@dataclass
class ReconstructionReport:
    c_est: complex
    c_theory: Optional[complex]
    rel_l2_error: float
    grids: dict
    warnings: list = field(default_factory=list)
    runtime_s: Optional[float] = None
    predictions: dict = field(default_factory=dict)
    matching_conventions: list = field(default_factory=list)
    boundary_mass_fraction: float = 0.0
    imag_residue: float = 0.0

    def to_dict(self) -> dict:
        def cplx(z):
            return None if z is None else [float(np.real(z)), float(np.imag(z))]

        return {
            "c_est": cplx(self.c_est),
            "c_theory": cplx(self.c_theory),
            "rel_l2_error": float(self.rel_l2_error),
            "grids": self.grids,
            "warnings": list(self.warnings),
            "runtime_s": self.runtime_s,
            "predictions": {k: cplx(v) for k, v in self.predictions.items()},
            "matching_conventions": list(self.matching_conventions),
            "boundary_mass_fraction": float(self.boundary_mass_fraction),
            "imag_residue": float(self.imag_residue),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _on_grid(f: SampledField, grid: Optional[Grid]) -> SampledField:
    if grid is None or grid == f.grid:
        return f
    if f.evaluator is None:
        raise InputError("resampling a field onto another grid needs a closed-form evaluator")
    return f.resample(grid)


def _predictions(sigma: Profile, rho: Profile, m: int) -> dict:
    res = spectral_pairing(sigma, rho, m, "thm1")
    out = {}
    for conv in CONVENTIONS:
        out[conv] = res.value * (2 * np.pi) ** (m - 1) if conv == "appendixA" else res.value
    return out


def matching_conventions(c_est: complex, predictions: dict, tol: float = 0.05) -> list:
    return [k for k, v in predictions.items() if v != 0 and abs(c_est / v - 1) <= tol]


def reconstruct(f: SampledField, sigma: Profile, rho: Profile, x_grid: Optional[Grid] = None,
                xi_grid: Optional[Grid] = None, match_tol: float = 0.05):
    """S_sigma[R_rho[f]] on the data grid, with a report.

    ``c_est`` is the Rayleigh quotient <S R f, f> / <f, f>; ``c_theory`` is the
    spectral prediction of whichever convention(s) the measurement matches.
    The relative L2 error is taken against ``c_theory`` when one matches and
    otherwise against ``c_est``.
    """
    t0 = time.perf_counter()
    f = _on_grid(f, x_grid)
    m = f.m
    xi_grid = xi_grid or default_xi_grid(m)
    preds = _predictions(sigma, rho, m)  # raises AdmissibilityError for bad pairs
    if all(v == 0 for v in preds.values()):
        raise AdmissibilityError(f"<<{sigma.kind}, {rho.kind}>> = 0 in dimension {m}")
    R = ridgelet_transform(f, affine_feature(rho, m), xi_grid)
    S = nn_apply(R, affine_feature(sigma, m), f.grid.points).reshape(f.grid.shape)
    out = SampledField(f.grid, S, None, {"source": "reconstruct"})

    fnorm2 = np.sum(np.abs(f.flat) ** 2)
    if fnorm2 * f.grid.cell_measure < 1e-24:
        raise InputError("target function is numerically zero")
    c_est = complex(np.sum(S.ravel() * np.conj(f.flat)) / fnorm2)
    match = matching_conventions(c_est, preds, match_tol)
    c_theory = preds[match[0]] if match else None
    c = c_theory if c_theory is not None else c_est
    err = float(np.sqrt(np.sum(np.abs(S.ravel() / c - f.flat) ** 2) / fnorm2))

    msgs = list(R.meta.get("warnings", []))
    bmf = R.boundary_mass_fraction()
    if bmf > BOUNDARY_MASS_TOL:
        msgs.append(f"boundary mass fraction of R[f] is {bmf:.2e} > {BOUNDARY_MASS_TOL:g}; widen the (a, b) box")
    if f.boundary_ratio() > DECAY_TOL:
        msgs.append(f"target has not decayed at the data-grid boundary (ratio {f.boundary_ratio():.2e})")
    real_case = sigma.is_real and rho.is_real and not np.iscomplexobj(f.values)
    imag = float(np.abs(S.imag).max() / max(np.abs(S.real).max(), 1e-300)) if real_case else 0.0
    if real_case and imag > IMAG_TOL:
        msgs.append(f"imaginary residue {imag:.2e} exceeds {IMAG_TOL:g}")
    if not match:
        msgs.append("c_est matches no spectral convention within tolerance; error normalized by c_est")
    report = ReconstructionReport(
        c_est=c_est, c_theory=c_theory, rel_l2_error=err,
        grids={"x": f.grid.describe(), "xi": xi_grid.describe(), "sigma": sigma.kind, "rho": rho.kind, "m": m},
        warnings=msgs, runtime_s=time.perf_counter() - t0, predictions=preds,
        matching_conventions=match, boundary_mass_fraction=bmf, imag_residue=imag)
    return out, report


def estimate_schur_constant(f: SampledField, sigma: Profile, rho: Profile, xi_grid: Optional[Grid] = None,
                            x_grid: Optional[Grid] = None, method: str = "direct") -> complex:
    """Rayleigh quotient <S_sigma R_rho f, f> / <f, f> by quadrature.

    ``method="adjoint"`` evaluates the same discrete quantity as
    <R_rho f, R_sigma f> over the parameter grid (the midpoint sums are adjoint
    to each other), which skips the synthesis pass.
    """
    f = _on_grid(f, x_grid)
    m = f.m
    if f.norm() < 1e-12:
        raise InputError("estimate_schur_constant needs a nonzero test function")
    xi_grid = xi_grid or default_xi_grid(m)
    fnorm2 = np.sum(np.abs(f.flat) ** 2) * f.grid.cell_measure
    R = ridgelet_transform(f, affine_feature(rho, m), xi_grid)
    if method == "direct":
        S = nn_apply(R, affine_feature(sigma, m), f.grid.points)
        return complex(np.sum(S * np.conj(f.flat)) * f.grid.cell_measure / fnorm2)
    if method == "adjoint":
        Rs = R if sigma is rho else ridgelet_transform(f, affine_feature(sigma, m), xi_grid)
        return complex(np.sum(R.values * np.conj(Rs.values)) * xi_grid.cell_measure / fnorm2)
    raise InputError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# finite-width synthesis


def _box_grid(m: int, a_half: float, b_half: float, n_cells: int) -> Grid:
    vol = (2 * a_half) ** m * (2 * b_half)
    h = (vol / n_cells) ** (1.0 / (m + 1))
    na = max(1, int(round(2 * a_half / h)))
    nb = max(1, int(round(2 * b_half / h)))
    return param_grid([(-a_half, a_half, na)] * m, (-b_half, b_half, nb))


def synthesize_network(f: SampledField, rho: Profile, sigma: Optional[Profile] = None,
                       xi_box: Optional[tuple[float, float]] = None, width: int = 1024,
                       scheme: str = "grid_topk", seed: int = 0, oversample: float = 1.5,
                       convention: str = "appendixA") -> Atoms:
    """Finite-width network whose output approximates f.

    Coefficients are c_i = R_rho[f](xi_i) * (cell weight) / <<sigma, rho>>.
    ``grid_topk`` lays ~``oversample * width`` equal cells over the (a, b) box
    and keeps the ``width`` cells with the largest |R|. ``importance_mc`` draws
    ``width`` cells from a 16x finer grid with probability proportional to |R|
    and reweights so the estimator is unbiased.
    """
    sigma = sigma if sigma is not None else rho
    m = f.m
    if width < 1:
        raise InputError("width must be >= 1")
    c = bilinear_form(sigma, rho, m, convention)
    if c == 0:
        raise AdmissibilityError(f"<<{sigma.kind}, {rho.kind}>> = 0; synthesis cannot be normalized")
    if xi_box is None:
        g = default_xi_grid(m)
        xi_box = (g.axes[0][1], g.axes[-1][1])
    a_half, b_half = map(float, xi_box)
    feat = affine_feature(rho, m)
    if scheme == "grid_topk":
        grid = _box_grid(m, a_half, b_half, int(np.ceil(oversample * width)))
        R = ridgelet_transform(f, feat, grid).values.ravel()
        order = np.argsort(-np.abs(R), kind="stable")[:width]
        pts = grid.points[order]
        coef = R[order] * grid.cell_measure / c
    elif scheme == "importance_mc":
        grid = _box_grid(m, a_half, b_half, 16 * width)
        R = ridgelet_transform(f, feat, grid).values.ravel()
        mass = np.abs(R)
        total = mass.sum()
        if total == 0:
            idx = np.arange(min(width, R.size))
            return Atoms(np.zeros(idx.size), grid.points[idx, :-1], grid.points[idx, -1])
        rng = np.random.default_rng(seed)
        idx = rng.choice(R.size, size=width, replace=True, p=mass / total)
        pts = grid.points[idx]
        coef = total * grid.cell_measure * (R[idx] / mass[idx]) / (width * c)
    else:
        raise InputError(f"unknown synthesis scheme {scheme!r}")
    return Atoms(coef, pts[:, :-1], pts[:, -1])


# ---------------------------------------------------------------------------
# consistency checks


@dataclass(frozen=True)
class DualityReport:
    lhs: complex
    rhs: complex
    abs_deviation: float
    rel_deviation: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lhs"] = [self.lhs.real, self.lhs.imag]
        d["rhs"] = [self.rhs.real, self.rhs.imag]
        return d


def duality_check(gamma: Atoms, f: SampledField, phi: InvariantFeature, grid: Optional[Grid] = None,
                  reference_refine: int = 4) -> DualityReport:
    """Compare <gamma, R[f]>_Xi with <NN[gamma], f>_X.

    The left side evaluates R[f] at the atoms on a ``reference_refine``-times
    finer data grid (f needs a closed form for that); the right side is the
    midpoint rule on ``grid`` (default: f's grid). Both sides are the same
    double integral, so the deviation is the quadrature error of the right side.
    """
    grid = grid or f.grid
    if gamma.width == 0:
        return DualityReport(0j, 0j, 0.0, 0.0)
    ref = f if f.evaluator is None or reference_refine == 1 else f.resample(f.grid.refined(reference_refine))
    R_at = ridgelet_apply(ref, phi, (gamma.a, gamma.b))
    lhs = complex(np.sum(gamma.c * np.conj(R_at)))
    fg = _on_grid(f, grid)
    nn = nn_apply(gamma, phi, grid.points)
    rhs = complex(np.sum(nn * np.conj(fg.flat)) * grid.cell_measure)
    dev = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    return DualityReport(lhs, rhs, dev, dev / scale if scale > 0 else 0.0)


@dataclass(frozen=True)
class IntertwiningReport:
    ridgelet_deviation: float
    network_deviation: float
    transport: str
    normalized: bool

    @property
    def max_deviation(self) -> float:
        return max(self.ridgelet_deviation, self.network_deviation)

    def to_dict(self) -> dict:
        return {"ridgelet_dev": self.ridgelet_deviation, "network_dev": self.network_deviation,
                "max_dev": self.max_deviation, "transport": self.transport, "normalized": self.normalized}


def default_xi_samples(xi_grid: Grid, max_per_axis: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Nodes of ``xi_grid`` in the inner box |a_j| <= 3/8 A, |b| <= 1/4 B, thinned to a stride.

    Using grid nodes means the interpolated side is exact when g is the identity.
    """
    sel = []
    for k, (lo, hi, n) in enumerate(xi_grid.axes):
        c = xi_grid.centers(k)
        frac = 0.25 if k == xi_grid.ndim - 1 else 0.375
        half = frac * max(abs(lo), abs(hi))
        idx = np.nonzero(np.abs(c - 0.5 * (lo + hi)) <= half)[0]
        step = max(1, int(np.ceil(idx.size / max_per_axis)))
        sel.append(c[idx[::step]])
    mesh = np.meshgrid(*sel, indexing="ij")
    pts = np.stack([v.ravel() for v in mesh], axis=-1)
    return pts[:, :-1], pts[:, -1]


def default_x_samples(m: int) -> np.ndarray:
    return Grid.cube(-3.0, 3.0, 60 if m == 1 else 16, m).points


def gaussian_density(m: int, center: float = 0.5):
    """gamma(a, b) = exp(-|a - c|^2 - (b - c/2)^2), a rapidly decaying test density on Xi.

    Off-centre on purpose: a density even in (a, b) is annihilated by odd
    profiles, which would make the network identity vacuous.
    """
    def ev(a, b):
        d = np.atleast_2d(a) - center
        db = np.asarray(b, dtype=float).ravel() - 0.5 * center
        return np.exp(-np.sum(d * d, axis=1) - db ** 2)
    return ev


def _rel(lhs, rhs) -> float:
    scale = float(np.abs(rhs).max())
    return float(np.abs(lhs - rhs).max() / scale) if scale > 0 else float(np.abs(lhs - rhs).max())


def covering_grid(grid: Grid, g: AffineElement) -> Grid:
    """Grid with ``grid``'s spacing whose box contains both the box and its image under g."""
    corners = np.array(np.meshgrid(*[(lo, hi) for lo, hi, _ in grid.axes], indexing="ij")).reshape(grid.ndim, -1).T
    img = groups.affine_apply(g, corners)
    axes = []
    for k, (lo, hi, n) in enumerate(grid.axes):
        h = (hi - lo) / n
        left = int(np.ceil(max(lo - img[:, k].min(), 0.0) / h - 1e-9))
        right = int(np.ceil(max(img[:, k].max() - hi, 0.0) / h - 1e-9))
        axes.append((lo - left * h, hi + right * h, n + left + right))
    return Grid(tuple(axes))


def intertwining_check(g: AffineElement, f: SampledField, rho: Profile, sigma: Profile,
                       xi_grid: Optional[Grid] = None, x_grid: Optional[Grid] = None,
                       xi_samples=None, x_samples=None, gamma: Optional[GridDistribution] = None,
                       normalized: bool = True, transport: str = "interpolate",
                       ridgelet: Optional[GridDistribution] = None) -> IntertwiningReport:
    """Check R o pi_g = pi^_g o R and S o pi^_g = pi_g o S numerically.

    Ridgelet identity: the left side is R_rho of the transported field (closed
    form of f required) at ``xi_samples``; the right side transports the
    gridded R_rho[f] with the dual regular action. Network identity: the left
    side synthesizes from the transported grid density, the right side
    evaluates S_sigma[gamma] at g^{-1} x. ``gamma`` defaults to a Gaussian
    density sampled on the parameter grid. With ``transport="interpolate"``
    grid values are moved by cubic splines; ``"pointwise"`` re-evaluates the
    transforms at the moved points instead. The transported field is sampled
    on the covering grid of g so the moved mass is not cut off at the box. ``ridgelet`` may pass a gridded
    R_rho[f] on ``xi_grid`` computed earlier, to reuse it across many g.
    """
    if transport not in ("interpolate", "pointwise"):
        raise InputError(f"unknown transport {transport!r}")
    m = f.m
    f = _on_grid(f, x_grid)
    xi_grid = xi_grid or default_xi_grid(m)
    a_s, b_s = xi_samples if xi_samples is not None else default_xi_samples(xi_grid, 24 if m == 1 else 8)
    xs = x_samples if x_samples is not None else default_x_samples(m)
    if f.evaluator is None:
        raise InputError("intertwining_check needs a target with a closed form")
    rfeat = affine_feature(rho, m)
    sfeat = affine_feature(sigma, m)
    det = g.det_L if normalized else 1.0

    # R o pi_g  vs  pi^_g o R
    moved_f = groups.regular_action(g, f, normalized=normalized).resample(covering_grid(f.grid, g))
    lhs = ridgelet_apply(moved_f, rfeat, (a_s, b_s))
    a0, b0 = groups.affine_dual_apply_inverse(g, a_s, b_s)
    if transport == "interpolate":
        R = ridgelet if ridgelet is not None else ridgelet_transform(f, rfeat, xi_grid)
        if R.grid != xi_grid:
            raise InputError("precomputed ridgelet transform lives on a different grid")
        rhs = groups.dual_regular_action(g, R, normalized=normalized)(a_s, b_s)
    else:
        rhs = det ** 0.5 * ridgelet_apply(f, rfeat, (a0, b0))
    dev_r = _rel(lhs, rhs)

    # S o pi^_g  vs  pi_g o S
    if gamma is None:
        dens = GridDistribution.from_function(gaussian_density(m), xi_grid)
        gamma = dens if transport == "pointwise" else GridDistribution(xi_grid, dens.values)
    moved = groups.dual_regular_action(g, gamma, normalized=normalized)
    lhs2 = nn_apply(GridDistribution(moved.grid, moved.values), sfeat, xs)
    x0 = groups.affine_apply(groups.inverse(g), xs)
    rhs2 = det ** -0.5 * nn_apply(gamma, sfeat, x0)
    dev_s = _rel(lhs2, rhs2)
    return IntertwiningReport(dev_r, dev_s, transport, normalized)


def refinement_ratios(deviations: Sequence[float], floor: float = 1e-12) -> list[float]:
    """Successive ratios dev[k] / dev[k+1], stopping once a deviation reaches ``floor``."""
    out = []
    for d0, d1 in zip(deviations[:-1], deviations[1:]):
        if d0 <= floor:
            break
        out.append(d0 / max(d1, np.finfo(float).tiny))
    return out

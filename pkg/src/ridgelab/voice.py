"""Voice transform on the 1-D affine group, the continuous wavelet transform and its inversion.

Coordinates on the group are (b, a) with a > 0; g = (a, b) acts by x -> a x + b.
The left Haar measure db da / a^2 is discretized on a log-uniform a-grid, where
it becomes db d(log a) / a.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError, InputError
from .fields import Grid, SampledField
from .groups import AffineElement, regular_action
from .invariants import InvariantFeature, Profile
from .spectrum import fourier_values, integrate_spectrum, OMEGA_MAX, OMEGA_POINTS

ZERO_MEAN_TOL = 1e-8


class NyquistWarning(UserWarning):
    pass


@dataclass(frozen=True)
class WaveletParams:
    """Inclusive node grids: ``n_scales`` log-uniform scales and ``n_b`` uniform shifts."""

    a_min: float = 2.0 ** -4
    a_max: float = 2.0 ** 3
    n_scales: int = 33
    b_min: float = -12.0
    b_max: float = 12.0
    n_b: int = 481

    def __post_init__(self):
        if not 0 < self.a_min < self.a_max:
            raise InputError("scales must satisfy 0 < a_min < a_max")
        if not self.b_min < self.b_max:
            raise InputError("shift range must be increasing")
        if self.n_scales < 2 or self.n_b < 2:
            raise InputError("need at least two scales and two shifts")

    @property
    def a(self) -> np.ndarray:
        return np.geomspace(self.a_min, self.a_max, self.n_scales)

    @property
    def b(self) -> np.ndarray:
        return np.linspace(self.b_min, self.b_max, self.n_b)

    @property
    def d_log_a(self) -> float:
        return float(np.log(self.a_max / self.a_min) / (self.n_scales - 1))

    @property
    def db(self) -> float:
        return (self.b_max - self.b_min) / (self.n_b - 1)

    def haar_weights(self) -> np.ndarray:
        """Weight of each a-node under db da / a^2 (shape ``(n_scales,)``)."""
        return self.db * self.d_log_a / self.a


@dataclass
class CWTResult:
    params: WaveletParams
    values: np.ndarray  # shape (n_b, n_scales)
    warnings: list = field(default_factory=list)

    def to_csv(self, path_or_buf=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["b", "a", "re", "im"])
        for i, b in enumerate(self.params.b):
            for j, a in enumerate(self.params.a):
                v = complex(self.values[i, j])
                w.writerow([repr(float(b)), repr(float(a)), repr(v.real), repr(v.imag)])
        text = buf.getvalue()
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w", newline="") as fh:
                    fh.write(text)
        return text


def voice_transform(f: SampledField, phi: Profile, g: AffineElement) -> complex:
    """V_phi[f](g) = <f, pi_g phi> with the unitary regular action."""
    if f.m != 1 or g.m != 1:
        raise InputError("the voice transform is implemented on the 1-D affine group")
    base = SampledField.from_function(lambda p: phi(p[:, 0]), f.grid)
    moved = regular_action(g, base, normalized=True)
    return f.inner(moved)


def wavelet_feature(psi: Profile) -> InvariantFeature:
    """phi(x, (a, b)) = psi((x - b) / a) / sqrt(a), the group_translate feature on Aff(1)."""
    return InvariantFeature("group_translate", profile=psi, m=1, unitary=True)


def cwt(f: SampledField, psi: Profile, params: WaveletParams) -> CWTResult:
    """W[f](b, a) = int f(x) conj(psi((x - b) / a)) dx / sqrt(a) by midpoint quadrature."""
    if f.m != 1:
        raise InputError("cwt needs a 1-D field")
    x = f.grid.centers(0)
    h = f.grid.spacings[0]
    wf = f.flat * h
    out = np.empty((params.n_b, params.n_scales), dtype=complex)
    msgs = []
    if params.a_min < 2 * h:
        msgs.append(f"nyquist: smallest scale {params.a_min:.3g} < 2 dx = {2 * h:.3g}")
        warnings.warn(msgs[-1], NyquistWarning, stacklevel=2)
    b = params.b
    for j, a in enumerate(params.a):
        K = psi((x[None, :] - b[:, None]) / a) / np.sqrt(a)
        if not psi.is_real:
            K = np.conj(K)
        out[:, j] = K @ wf.real + 1j * (K @ wf.imag) if not np.iscomplexobj(K) else K @ wf
    return CWTResult(params, out, msgs)


def _spectral_density(psi: Profile):
    def fn(w):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.abs(fourier_values(psi, w)) ** 2 / np.abs(w)
    return fn


def _check_zero_mean(psi: Profile) -> None:
    F0 = abs(complex(fourier_values(psi, np.array([0.0]))[0]))
    if not np.isfinite(F0) or F0 > ZERO_MEAN_TOL:
        raise AdmissibilityError(f"wavelet {psi.kind} has psi#(0) = {F0:.3g}; it must vanish")


def admissibility_constant(psi: Profile, n_points: int = OMEGA_POINTS, omega_max: float = OMEGA_MAX) -> float:
    """int |psi#(w)|^2 / |w| dw over the whole line."""
    _check_zero_mean(psi)
    return float(integrate_spectrum(_spectral_density(psi), omega_max, n_points).value.real)


def calderon_constant(psi: Profile, n_points: int = OMEGA_POINTS, omega_max: float = OMEGA_MAX) -> float:
    """int_0^inf |psi#(w)|^2 / w dw, the normalization matching positive scales only.

    Equal to half of :func:`admissibility_constant` for real wavelets. If the two
    half-lines differ the inversion over a > 0 is not a multiple of the
    identity, which is reported as an admissibility error.
    """
    _check_zero_mean(psi)
    dens = _spectral_density(psi)
    pos = integrate_spectrum(dens, omega_max, n_points, sides="positive").value.real
    neg = integrate_spectrum(dens, omega_max, n_points, sides="negative").value.real
    if abs(pos - neg) > 1e-8 * max(abs(pos), abs(neg)):
        raise AdmissibilityError("positive and negative frequency halves of the wavelet differ; "
                                 "inversion over a > 0 is not scalar")
    if pos <= 0:
        raise AdmissibilityError("wavelet has no spectral mass")
    return float(pos)


def dual_voice_reconstruct(W: CWTResult, psi: Profile, params: WaveletParams | None = None,
                           x_grid: Grid | None = None) -> SampledField:
    """(1/C) sum_{b,a} W(b, a) psi((x - b) / a) / sqrt(a) db da / a^2 on ``x_grid``."""
    params = params or W.params
    if x_grid is None:
        x_grid = Grid(((-6.0, 6.0, 481),))
    C = calderon_constant(psi)
    x = x_grid.centers(0)
    b = params.b
    wts = params.haar_weights()
    out = np.zeros(x.size, dtype=complex)
    for j, a in enumerate(params.a):
        K = psi((x[:, None] - b[None, :]) / a) / np.sqrt(a)
        col = W.values[:, j] * wts[j]
        out += K @ col.real + 1j * (K @ col.imag) if not np.iscomplexobj(K) else K @ col
    return SampledField(x_grid, out / C, None, {"source": "dual_voice_reconstruct", "calderon_constant": C})


def wavelet_reconstruction_error(f: SampledField, psi: Profile, params: WaveletParams) -> tuple[float, SampledField, CWTResult]:
    """Relative L2 error of the Calderon inversion of f, evaluated on f's grid."""
    W = cwt(f, psi, params)
    rec = dual_voice_reconstruct(W, psi, params, f.grid)
    err = float(np.linalg.norm(rec.flat - f.flat) / np.linalg.norm(f.flat))
    return err, rec, W

import io

import numpy as np
import pytest

from ridgelab.errors import AdmissibilityError, InputError
from ridgelab.fields import Grid, SampledField
from ridgelab.groups import AffineElement
from ridgelab.invariants import profile
from ridgelab.transforms import ridgelet_apply
from ridgelab.voice import (CWTResult, NyquistWarning, WaveletParams, admissibility_constant, calderon_constant,
                            cwt, dual_voice_reconstruct, voice_transform, wavelet_feature,
                            wavelet_reconstruction_error)

D2 = profile("gaussian_d2")
XG = Grid(((-6.0, 6.0, 481),))


def field(fn, grid=XG):
    return SampledField.from_function(lambda p: fn(p[:, 0]), grid)


def test_params_validation():
    with pytest.raises(InputError):
        WaveletParams(a_min=0.0)
    with pytest.raises(InputError):
        WaveletParams(b_min=1.0, b_max=0.0)
    p = WaveletParams()
    assert p.a[0] == pytest.approx(2 ** -4) and p.a[-1] == pytest.approx(8.0) and p.a.size == 33
    assert p.db == pytest.approx(0.05)


def test_voice_examples():
    f = field(lambda x: np.exp(-x ** 2 / 2))
    phi_f = field(D2)
    e = AffineElement.identity(1)
    assert voice_transform(f, D2, e) == pytest.approx(f.inner(phi_f), abs=1e-15)
    assert voice_transform(phi_f, D2, e) == pytest.approx(phi_f.norm() ** 2, rel=1e-12)
    rng = np.random.default_rng(0)
    bound = f.norm() * phi_f.norm()
    for _ in range(20):
        g = AffineElement(np.exp(rng.uniform(-1, 1)), rng.uniform(-2, 2))
        assert abs(voice_transform(f, D2, g)) <= bound * (1 + 1e-9)


def test_cwt_matched_filter_and_zero():
    psi_f = field(D2)
    p = WaveletParams(a_min=0.5, a_max=2.0, n_scales=3, b_min=-1.0, b_max=1.0, n_b=3)
    W = cwt(psi_f, D2, p)
    assert W.values[1, 1] == pytest.approx(psi_f.norm() ** 2, rel=1e-12)
    assert np.all(cwt(field(lambda x: 0 * x), D2, p).values == 0)


def test_cwt_translation_covariance():
    tau = 0.5  # ten shift steps of 0.05
    f = field(lambda x: np.exp(-x ** 2 / 2))
    ft = field(lambda x: np.exp(-(x - tau) ** 2 / 2))
    p = WaveletParams(a_min=0.25, a_max=2.0, n_scales=7, b_min=-3.0, b_max=3.0, n_b=121)
    W, Wt = cwt(f, D2, p).values, cwt(ft, D2, p).values
    np.testing.assert_allclose(Wt[10:], W[:-10], atol=1e-6)


def test_cwt_nyquist_warning():
    coarse = field(lambda x: np.exp(-x ** 2), Grid(((-6.0, 6.0, 60),)))
    with pytest.warns(NyquistWarning):
        res = cwt(coarse, D2, WaveletParams(a_min=0.05, n_scales=5, n_b=11))
    assert res.warnings


def test_cwt_matches_ridgelet_path():
    f = field(lambda x: np.exp(-x ** 2 / 2) * (1 + 0.3 * x))
    p = WaveletParams(n_b=121)
    W = cwt(f, D2, p).values
    aa, bb = np.meshgrid(p.a, p.b)
    R = ridgelet_apply(f, wavelet_feature(D2), (aa.ravel(), bb.ravel())).reshape(W.shape)
    assert np.abs(R - W).max() <= 1e-10


def test_admissibility_constants():
    full = admissibility_constant(D2)
    assert full == pytest.approx(2 * np.pi, rel=1e-10)
    fine = admissibility_constant(D2, n_points=4 * 2 ** 14 + 1)
    assert abs(full - fine) <= 1e-4 * fine
    assert calderon_constant(D2) == pytest.approx(full / 2, rel=1e-12)
    with pytest.raises(AdmissibilityError):
        admissibility_constant(profile("gaussian"))


def test_reconstruct_zero():
    p = WaveletParams(n_b=81, n_scales=9)
    W = CWTResult(p, np.zeros((p.n_b, p.n_scales)))
    assert np.all(dual_voice_reconstruct(W, D2, p, XG).values == 0)
    with pytest.raises(AdmissibilityError):
        dual_voice_reconstruct(W, profile("gaussian"), p, XG)


def test_csv_columns():
    p = WaveletParams(a_min=0.5, a_max=1.0, n_scales=2, b_min=0.0, b_max=1.0, n_b=2)
    text = cwt(field(lambda x: np.exp(-x ** 2)), D2, p).to_csv()
    rows = text.strip().splitlines()
    assert rows[0] == "b,a,re,im" and len(rows) == 5


def test_scale_extent_convergence():
    """With the scale range and shift range widened, the inversion converges."""
    f = field(lambda x: np.exp(-x ** 2 / 2))
    base, _, _ = wavelet_reconstruction_error(f, D2, WaveletParams())
    wide, _, _ = wavelet_reconstruction_error(f, D2, WaveletParams(a_max=64.0, n_scales=47, b_min=-100.0,
                                                                    b_max=100.0, n_b=4001))
    assert wide < 0.05 < base

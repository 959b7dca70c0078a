import warnings

import numpy as np
import pytest

from ridgelab import groups
from ridgelab.errors import AdmissibilityError, InputError
from ridgelab.fields import Atoms, Grid, GridDistribution, SampledField, param_grid
from ridgelab.groups import AffineElement
from ridgelab.invariants import affine_feature, profile, profile_sum
from ridgelab.spectrum import bilinear_form, calibrate_rho
from ridgelab.targets import target_field
from ridgelab.transforms import (NyquistWarning, default_xi_grid, duality_check, estimate_schur_constant,
                                 finite_network_eval, intertwining_check, nn_apply, reconstruct,
                                 refinement_ratios, ridgelet_apply, ridgelet_transform, synthesize_network)

D1 = profile("gaussian_d1")
X1 = Grid(((-8.0, 8.0, 401),))


def gauss(name="gaussian", grid=X1):
    return target_field(name, grid)


# ---------------------------------------------------------------- networks

def test_nn_apply_trivial_cases():
    phi = affine_feature(profile("gaussian"), 1)
    x = np.linspace(-2, 2, 9)
    assert np.all(nn_apply(Atoms.empty(1), phi, x) == 0)
    grid = param_grid([(-2.0, 2.0, 8)], (-2.0, 2.0, 8))
    assert np.all(nn_apply(GridDistribution(grid, np.zeros(grid.shape)), phi, x) == 0)
    single = nn_apply(Atoms([1.0], [[0.7]], [0.2]), phi, x)
    np.testing.assert_allclose(single, np.exp(-(0.7 * x - 0.2) ** 2 / 2), atol=1e-15)


def test_nn_apply_grid_matches_refined_oracle():
    phi = affine_feature(profile("gaussian"), 1)
    ev = lambda a, b: np.exp(-a[:, 0] ** 2 - b ** 2)  # noqa: E731
    coarse = param_grid([(-5.0, 5.0, 50)], (-5.0, 5.0, 50))
    x = np.linspace(-3, 3, 13)
    lo = nn_apply(GridDistribution.from_function(ev, coarse), phi, x)
    hi = nn_apply(GridDistribution.from_function(ev, coarse.refined(4)), phi, x)
    assert np.abs(lo - hi).max() <= 1e-4 * np.abs(hi).max()


def test_finite_network_relu_hand_case():
    phi = affine_feature(profile("relu"), 2)
    at = Atoms([1.0, -1.0], [[1.0, 0.0], [1.0, 1.0]], [0.0, 1.0])
    # the hand case uses the scalar input x = 2 on the first coordinate
    phi1 = affine_feature(profile("relu"), 1)
    at1 = Atoms([1.0, -1.0], [[1.0], [1.0]], [0.0, 1.0])
    assert finite_network_eval(at1, phi1, 2.0) == 1.0
    pts = np.array([[2.0, 0.0], [0.5, 0.5]])
    assert np.array_equal(finite_network_eval(at, phi, pts), nn_apply(at, phi, pts))
    assert finite_network_eval(Atoms.empty(2), phi, pts).tolist() == [0, 0]


def test_domain_mismatch():
    with pytest.raises(InputError):
        nn_apply(Atoms([1.0], [[1.0, 2.0]], [0.0]), affine_feature(D1, 1), [0.0])
    with pytest.raises(InputError):
        ridgelet_apply(gauss(), affine_feature(D1, 2), (np.ones(2), 0.0))


# ---------------------------------------------------------------- ridgelet

def test_ridgelet_trivial_and_oracles():
    phi = affine_feature(D1, 1)
    zero = SampledField(X1, np.zeros(X1.shape))
    assert ridgelet_apply(zero, phi, (1.0, 0.0)) == 0
    f = gauss()
    fine = f.resample(X1.refined(4))
    for b in (0.0, 0.5, -1.3):
        v = ridgelet_apply(f, phi, (1.0, b))
        # int e^{-x^2/2} g'(x - b) dx = -d/db sqrt(pi) e^{-b^2/4}
        exact = np.sqrt(np.pi) * (b / 2) * np.exp(-b * b / 4)
        assert abs(v - ridgelet_apply(fine, phi, (1.0, b))) <= 1e-6
        assert abs(v - exact) <= 1e-6


def test_ridgelet_real_for_real_inputs():
    R = ridgelet_transform(gauss(), affine_feature(D1, 1), param_grid([(-4.0, 4.0, 20)], (-4.0, 4.0, 20)))
    assert np.all(R.values.imag == 0)


def test_ridgelet_nyquist_warning():
    coarse = gauss(grid=Grid(((-8.0, 8.0, 40),)))
    with pytest.warns(NyquistWarning):
        ridgelet_apply(coarse, affine_feature(D1, 1), (10.0, 0.0))
    R = ridgelet_transform(coarse, affine_feature(D1, 1), param_grid([(-10.0, 10.0, 10)], (-1.0, 1.0, 4)))
    assert any("nyquist" in w for w in R.meta["warnings"])


def test_transforms_are_linear():
    phi = affine_feature(D1, 1)
    f, h = gauss(), gauss("gaussian_x")
    xi = (np.array([[0.5], [1.0], [2.0]]), np.array([0.1, -0.4, 1.0]))
    lhs = ridgelet_apply(SampledField(X1, 2 * f.values - 3j * h.values), phi, xi)
    rhs = 2 * ridgelet_apply(f, phi, xi) - (-3j) * 0 + np.conj(-3j) * 0 + (-3j) * ridgelet_apply(h, phi, xi)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    at1 = Atoms([1.0, 2.0], [[0.5], [1.0]], [0.0, 1.0])
    at2 = Atoms([0.5j], [[2.0]], [0.3])
    both = Atoms(np.r_[at1.c, at2.c], np.r_[at1.a, at2.a], np.r_[at1.b, at2.b])
    x = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(nn_apply(both, phi, x), nn_apply(at1, phi, x) + nn_apply(at2, phi, x), atol=1e-14)


# ---------------------------------------------------------------- reconstruction

def test_reconstruct_m1_and_linearity():
    f = gauss()
    out, rep = reconstruct(f, D1, D1)
    assert rep.rel_l2_error <= 0.02
    assert rep.c_theory == pytest.approx(2 * np.pi)
    assert rep.imag_residue < 1e-10
    d = rep.to_dict()
    for key in ("c_est", "c_theory", "rel_l2_error", "grids", "warnings", "runtime_s"):
        assert key in d
    out5, rep5 = reconstruct(f.scaled(5.0), D1, D1)
    assert np.abs(out5.values - 5 * out.values).max() <= 1e-12 * np.abs(5 * out.values).max()
    assert rep5.rel_l2_error == pytest.approx(rep.rel_l2_error, rel=1e-10)


def test_reconstruct_inadmissible_pair():
    with pytest.raises(AdmissibilityError):
        reconstruct(gauss(), profile("gaussian"), profile("gaussian"))


@pytest.mark.slow
def test_reconstruct_m2():
    f = target_field("gaussian", Grid.cube(-6.0, 6.0, 41, 2))
    d2 = profile("gaussian_d2")
    _, rep = reconstruct(f, d2, d2)
    assert rep.rel_l2_error <= 0.05
    assert rep.matching_conventions == ["appendixA"]


def test_reconstruct_uncalibrated_flags_warning():
    f = gauss()
    tanh, d3 = profile("tanh"), profile("gaussian_d3")
    rho, _ = calibrate_rho(tanh, 1, d3)
    xi = param_grid([(-8.0, 8.0, 201)], (-24.0, 24.0, 601))
    _, rep = reconstruct(f, tanh, rho, xi_grid=xi)
    assert rep.c_est == pytest.approx(1.0, rel=0.02)


# ---------------------------------------------------------------- Schur constant

def test_schur_constant_oracle_and_adjoint():
    f = gauss()
    direct = estimate_schur_constant(f, D1, D1)
    adj = estimate_schur_constant(f, D1, D1, method="adjoint")
    assert direct == pytest.approx(2 * np.pi, rel=0.02)
    assert abs(direct - adj) <= 1e-10 * abs(direct)
    with pytest.raises(InputError):
        estimate_schur_constant(SampledField(X1, np.zeros(X1.shape)), D1, D1)


def test_schur_constant_scalarity():
    xi = param_grid([(-16.0, 16.0, 401)], (-16.0, 16.0, 401))
    c1 = estimate_schur_constant(gauss(), D1, D1, xi, method="adjoint")
    c2 = estimate_schur_constant(gauss("gaussian_x"), D1, D1, xi, method="adjoint")
    assert abs(c1 / c2 - 1) <= 0.02


def test_schur_constant_relu_reproducible():
    rho = profile("gaussian_d4")
    relu = profile("relu")
    vals = []
    for seed in range(3):
        rng = np.random.default_rng(seed)
        s, w = rng.uniform(-1, 1), rng.uniform(0.8, 1.2)
        f = SampledField.from_function(lambda p: np.exp(-0.5 * ((p[:, 0] - s) / w) ** 2), X1)
        vals.append(estimate_schur_constant(f, relu, rho))
    vals = np.array(vals)
    assert np.all(np.isfinite(vals))
    assert np.abs(vals / vals[0] - 1).max() <= 0.02


def test_schur_constant_bilinear_in_sigma():
    f = gauss()
    s1, s2 = profile("gaussian_d1"), profile("gaussian_d3")
    rho = profile("gaussian_d1")
    lhs = estimate_schur_constant(f, profile_sum(s1, s2), rho)
    rhs = estimate_schur_constant(f, s1, rho) + estimate_schur_constant(f, s2, rho)
    assert abs(lhs / rhs - 1) <= 0.02


# ---------------------------------------------------------------- synthesis

def test_synthesis_zero_target():
    zero = SampledField(X1, np.zeros(X1.shape))
    for scheme in ("grid_topk", "importance_mc"):
        at = synthesize_network(zero, D1, width=64, scheme=scheme)
        assert at.width == 64 and np.all(at.c == 0)


def test_synthesis_inadmissible():
    with pytest.raises(AdmissibilityError):
        synthesize_network(gauss(), profile("gaussian"), width=16)


def test_synthesis_topk_1024():
    f = gauss()
    at = synthesize_network(f, D1, width=1024)
    x = np.linspace(-4, 4, 401)
    err = np.linalg.norm(nn_apply(at, affine_feature(D1, 1), x) - np.exp(-x ** 2 / 2)) / np.linalg.norm(np.exp(-x ** 2 / 2))
    assert err <= 0.05


def test_synthesis_importance_reproducible():
    f = gauss()
    a1 = synthesize_network(f, D1, width=512, scheme="importance_mc", seed=7)
    a2 = synthesize_network(f, D1, width=512, scheme="importance_mc", seed=7)
    assert np.array_equal(a1.c, a2.c) and np.array_equal(a1.a, a2.a)
    x = np.linspace(-4, 4, 401)
    out = nn_apply(a1, affine_feature(D1, 1), x)
    err = np.linalg.norm(out - np.exp(-x ** 2 / 2)) / np.linalg.norm(np.exp(-x ** 2 / 2))
    assert err < 0.5


# ---------------------------------------------------------------- duality

def _random_atoms(rng, k=8):
    return Atoms(rng.standard_normal(k) + 1j * rng.standard_normal(k),
                 rng.uniform(-2, 2, (k, 1)), rng.uniform(-2, 2, k))


def test_duality():
    phi = affine_feature(profile("gaussian"), 1)
    f = gauss()
    assert duality_check(Atoms.empty(1), f, phi).abs_deviation == 0
    rep = duality_check(_random_atoms(np.random.default_rng(1)), f, phi)
    assert rep.rel_deviation <= 1e-3


def test_duality_second_order():
    phi = affine_feature(profile("gaussian"), 1)
    at = _random_atoms(np.random.default_rng(2))
    devs = []
    for n in (25, 50, 100):
        f = gauss(grid=Grid(((-8.0, 8.0, n),)))
        devs.append(duality_check(at, f, phi, reference_refine=16).rel_deviation)
    ratios = refinement_ratios(devs)
    assert ratios and min(ratios) >= 4.0


# ---------------------------------------------------------------- intertwining

def test_intertwining_identity():
    f = gauss()
    rep = intertwining_check(AffineElement.identity(1), f, D1, D1)
    assert rep.max_deviation <= 1e-12


def test_intertwining_hand_element():
    rep = intertwining_check(AffineElement(2.0, 1.0), gauss(), D1, D1)
    assert rep.max_deviation <= 1e-3


def test_intertwining_translation_unnormalized():
    rep = intertwining_check(AffineElement.translation([0.7]), gauss(), D1, D1,
                             normalized=False, transport="pointwise")
    assert rep.max_deviation <= 1e-6


def test_intertwining_refinement():
    g = groups.random_affine(np.random.default_rng(5), 1)
    f = gauss()
    r1 = intertwining_check(g, f, D1, D1)
    r2 = intertwining_check(g, f, D1, D1, xi_grid=default_xi_grid(1).refined(2), x_grid=X1.refined(2))
    assert r1.max_deviation / r2.max_deviation >= 4

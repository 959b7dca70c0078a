import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ridgelab import groups
from ridgelab.errors import DegenerateParameterError, InputError
from ridgelab.fields import Atoms
from ridgelab.geometry import (GeometricAtoms, Hyperplane, check_hyperplane_covariance, from_geometric,
                               geometric_network_eval, hyperplane_from_params, point_plane_distance,
                               random_covariance_sweep, scaled_distance, to_geometric, transform_hyperplane)
from ridgelab.groups import AffineElement
from ridgelab.invariants import affine_feature, profile, theta
from ridgelab.transforms import finite_network_eval


def test_hyperplane_examples():
    h = hyperplane_from_params([0.0, 2.0], 4.0)
    np.testing.assert_array_equal(h.u, [0.0, 1.0])
    assert h.p == 2.0
    np.testing.assert_array_equal(h.foot, [0.0, 2.0])
    assert point_plane_distance(h.foot, h) == pytest.approx(0, abs=1e-12)
    assert hyperplane_from_params([1.0, 1.0], 0.0).p == 0.0
    h2 = hyperplane_from_params([0.0, 4.0], 8.0)
    np.testing.assert_array_equal(h2.u, h.u)
    assert h2.p == h.p
    with pytest.raises(DegenerateParameterError):
        hyperplane_from_params([0.0, 1e-15], 1.0)
    with pytest.raises(InputError):
        Hyperplane([1.0, 1.0], 0.0)


def test_distance_examples():
    h = hyperplane_from_params([0.0, 2.0], 4.0)
    x = np.array([5.0, 7.0])
    assert point_plane_distance(x, h) == 5.0
    assert scaled_distance(x, ([0.0, 2.0], 4.0)) == 10.0
    assert point_plane_distance([3.0, 2.0], h) == 0.0
    rng = np.random.default_rng(0)
    X, a, b = rng.standard_normal((20, 3)), rng.standard_normal(3), 0.4
    assert np.array_equal(scaled_distance(X, (a, b)), theta(X, a, b))


def test_covariance_examples():
    ab = (np.array([1.0, -2.0]), 0.3)
    assert check_hyperplane_covariance(AffineElement.identity(2), ab).plane_residual <= 1e-15
    g = groups.random_affine(np.random.default_rng(1), 2)
    rep = check_hyperplane_covariance(g, ab, n_points=100)
    assert rep.passed
    t = np.array([0.5, -1.0, 2.0])
    h = hyperplane_from_params([1.0, 2.0, 2.0], 3.0)
    moved = transform_hyperplane(AffineElement.translation(t), h)
    np.testing.assert_allclose(moved.u, h.u, atol=1e-15)
    assert moved.p == pytest.approx(h.p + h.u @ t, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3))
def test_covariance_property(seed, m):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(m)
    if np.linalg.norm(a) < 0.1:
        a += 1.0
    rep = check_hyperplane_covariance(groups.random_affine(rng, m), (a, rng.standard_normal()), 20, seed)
    assert rep.passed


def test_random_sweep():
    p, d = random_covariance_sweep(200)
    assert p <= 1e-9 and d <= 1e-9


def test_geometric_single_atom():
    geo = GeometricAtoms([1.0], [2.0], [[0.0, 1.0]], [2.0])
    assert geometric_network_eval(geo, profile("relu"), [5.0, 7.0])[0] == 10.0
    with pytest.raises(InputError):
        GeometricAtoms([1.0], [2.0], [[0.0, 2.0]], [2.0])


def test_round_trip_and_paired_evaluation():
    rng = np.random.default_rng(4)
    at = Atoms(rng.standard_normal(16) + 1j * rng.standard_normal(16), rng.standard_normal((16, 2)),
               rng.standard_normal(16))
    x = rng.standard_normal((100, 2))
    sig = profile("tanh")
    std = finite_network_eval(at, affine_feature(sig, 2), x)
    geo = to_geometric(at)
    np.testing.assert_allclose(geometric_network_eval(geo, sig, x), std, atol=1e-12)
    back = from_geometric(geo)
    np.testing.assert_allclose(finite_network_eval(back, affine_feature(sig, 2), x), std, atol=1e-12)
    again = GeometricAtoms.from_json(geo.to_json())
    assert np.array_equal(again.u, geo.u) and np.array_equal(again.c, geo.c)
    assert set(__import__("json").loads(geo.to_json())[0]) == {"c", "scale", "u", "p"}


def test_degenerate_atom():
    with pytest.raises(DegenerateParameterError):
        to_geometric(Atoms([1.0], [[0.0, 0.0]], [1.0]))

"""The affine feature as a function of distance to the hyperplane {a.x = b}."""

import numpy as np

from ridgelab import groups
from ridgelab.fields import Atoms
from ridgelab.geometry import (check_hyperplane_covariance, geometric_network_eval, hyperplane_from_params,
                               point_plane_distance, to_geometric)
from ridgelab.invariants import affine_feature, profile
from ridgelab.transforms import nn_apply

a, b = np.array([3.0, 4.0]), 5.0
H = hyperplane_from_params(a, b)
x = np.array([[0.0, 0.0], [3.0, 4.0]])
print("unit normal", H.u, "offset", H.p)
print("a.x - b =", x @ a - b, " |a| * signed distance =", np.linalg.norm(a) * point_plane_distance(x, H))

g = groups.random_affine(np.random.default_rng(0), 2)
print(check_hyperplane_covariance(g, (a, b)))

rng = np.random.default_rng(1)
atoms = Atoms(rng.standard_normal(4), rng.standard_normal((4, 2)), rng.standard_normal(4))
pts = rng.standard_normal((5, 2))
relu = profile("relu")
print(np.abs(geometric_network_eval(to_geometric(atoms), relu, pts) - nn_apply(atoms, affine_feature(relu, 2), pts)).max())

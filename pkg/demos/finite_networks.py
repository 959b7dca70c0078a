"""Discretizing the integral representation into a width-p network."""

import numpy as np

import ridgelab as rl

d1 = rl.profile("gaussian_d1")
f = rl.target_field("gaussian", rl.Grid(((-8.0, 8.0, 401),)))
x = np.linspace(-4, 4, 401)
truth = np.exp(-x ** 2 / 2)
phi = rl.affine_feature(d1, 1)

for p in (64, 256, 1024):
    atoms = rl.synthesize_network(f, d1, width=p)
    err = np.linalg.norm(rl.nn_apply(atoms, phi, x) - truth) / np.linalg.norm(truth)
    print(f"width {p:5d}: relative error {err:.4f}")

# <NN[gamma], f> = <gamma, R[f]> for a finite network
rng = np.random.default_rng(1)
gamma = rl.Atoms(rng.standard_normal(8), rng.uniform(-2, 2, (8, 1)), rng.uniform(-2, 2, 8))
rep = rl.duality_check(gamma, f, rl.affine_feature("gaussian", 1))
print("duality deviation:", rep.rel_deviation)

# intertwining under a random affine map
g = rl.random_affine(np.random.default_rng(2), 1)
print(rl.intertwining_check(g, f, d1, d1).to_dict())

"""Ridgelet transform followed by the dual network: S[R[f]] = c f."""

import numpy as np

import ridgelab as rl

d1 = rl.profile("gaussian_d1")
x = rl.Grid(((-8.0, 8.0, 401),))
f = rl.target_field("gaussian", x)

recon, rep = rl.reconstruct(f, d1, d1)
print(f"c_est = {rep.c_est:.5f}, predictions {rep.predictions}")
print(f"relative L2 error after dividing by c: {rep.rel_l2_error:.4f}")
print("grid warnings:", rep.warnings or "none")

# a single coefficient of R[f] has a closed form here
b = 0.5
print("R[f](1, 0.5) =", rl.ridgelet_apply(f, rl.affine_feature(d1, 1), (1.0, b)),
      " exact:", np.sqrt(np.pi) * (b / 2) * np.exp(-b * b / 4))

"""Joint invariance of the affine feature and the spectral constant <<sigma, rho>>."""

import numpy as np

import ridgelab as rl

# sigma(a.x - b) is unchanged when x moves by g and (a, b) by the twisted dual action
for m in (1, 2, 3):
    phi = rl.affine_feature("gaussian_d1", m)
    rep = rl.check_joint_invariance(phi, n_samples=10_000, rng=np.random.default_rng(m))
    print(f"m={m}: max relative deviation {rep.max_rel_deviation:.2e} over {rep.n_samples} samples")

# same check on a finite G-set, where it is exact
psi = np.random.default_rng(0).standard_normal(8)
rep = rl.check_joint_invariance(rl.InvariantFeature("group_translate", psi=psi, gset=rl.cyclic_gset(8)))
print("Z/8 translate feature, exhaustive:", rep.max_abs_deviation)

d1 = rl.profile("gaussian_d1")
print("<<d1, d1>> at m=1:", rl.bilinear_form(d1, d1, 1).real, " (2 pi =", 2 * np.pi, ")")
print("<<d1, d1>> at m=2:", rl.bilinear_form(d1, d1, 2).real, " (2 pi^1.5 =", 2 * np.pi ** 1.5, ")")

# tanh is not integrable, but its Fourier transform still pairs with a smooth rho
rho, s = rl.calibrate_rho(rl.profile("tanh"), 1, rl.profile("gaussian_d3"))
print("calibration scale for tanh against d3:", s, "->", rl.bilinear_form(rl.profile("tanh"), rho, 1))

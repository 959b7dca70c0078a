"""Exact finite-group case: the composite operator is diagonal in the Fourier basis of Z/n."""

import numpy as np

from ridgelab.deepexact import cyclic_feature, deep_exact_report, isotypic_scalars, named_psi

D = cyclic_feature(8, named_psi("random", 8, seed=3))
for s in isotypic_scalars(D):
    print(f"k={s.k}: lambda={s.scalar.real:+.6f}  |dft psi|^2={s.dft_power:.6f}  dev={s.deviation:.1e}")

rep = deep_exact_report(16, "delta0", 0)
print("delta0 on Z/16: all lambdas equal 1:", np.allclose(rep["lambdas"], 1.0))

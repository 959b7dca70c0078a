"""Continuous wavelet transform as the Aff(1) voice transform, and its truncation error."""

import numpy as np

from ridgelab.fields import Grid, SampledField
from ridgelab.invariants import profile
from ridgelab.voice import WaveletParams, calderon_constant, wavelet_reconstruction_error

mexican_hat = profile("gaussian_d2")
print("Calderon constant (half line):", calderon_constant(mexican_hat))

grid = Grid(((-6.0, 6.0, 481),))
f = SampledField.from_function(lambda p: np.exp(-p[:, 0] ** 2 / 2), grid)

# the low-frequency content above a_max is lost; widening the scale range recovers it
for a_max, scales, b_half, n_b in ((8.0, 33, 12.0, 481), (64.0, 47, 100.0, 4001)):
    params = WaveletParams(2.0 ** -4, a_max, scales, -b_half, b_half, n_b)
    err, _, _ = wavelet_reconstruction_error(f, mexican_hat, params)
    print(f"a_max={a_max:5.0f}: relative reconstruction error {err:.3f}")

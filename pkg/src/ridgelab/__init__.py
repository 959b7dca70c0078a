"""ridgelab: integral-representation networks with group-invariant features.

Numerical tools for phi-networks NN[gamma; phi], their ridgelet transforms
R[f; phi], the spectral constant <<sigma, rho>> of the reconstruction formula,
exact finite-group versions, the wavelet special case and the hyperplane
picture of the affine feature.
"""

__version__ = "0.1.0"

from .errors import (AdmissibilityError, CalibrationError, ConfigError, DegenerateParameterError,
                     ExtrapolationError, InputError, RidgelabError, SingularityError, UnsupportedError)
from .fields import Atoms, Grid, GridDistribution, SampledField, param_grid
from .groups import AffineElement, cyclic_group, cyclic_gset, random_affine
from .invariants import InvariantFeature, Profile, affine_feature, check_joint_invariance, profile
from .spectrum import bilinear_form, calibrate_rho, fourier1d, spectral_pairing
from .targets import target_field
from .transforms import (duality_check, estimate_schur_constant, finite_network_eval, intertwining_check,
                         nn_apply, reconstruct, ridgelet_apply, ridgelet_transform, synthesize_network)

__all__ = [
    "AdmissibilityError", "CalibrationError", "ConfigError", "DegenerateParameterError",
    "ExtrapolationError", "InputError", "RidgelabError", "SingularityError", "UnsupportedError",
    "Atoms", "Grid", "GridDistribution", "SampledField", "param_grid",
    "AffineElement", "cyclic_group", "cyclic_gset", "random_affine",
    "InvariantFeature", "Profile", "affine_feature", "check_joint_invariance", "profile",
    "bilinear_form", "calibrate_rho", "fourier1d", "spectral_pairing", "target_field",
    "duality_check", "estimate_schur_constant", "finite_network_eval", "intertwining_check",
    "nn_apply", "reconstruct", "ridgelet_apply", "ridgelet_transform", "synthesize_network",
]

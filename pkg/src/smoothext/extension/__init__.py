"""Constructive side: ideal decomposition, extensions, test polynomials."""

from .extend import Extension, ExtensionError, Sandwich, construct_extension, quotient_norm_sandwich, separating_step
from .omega import IdealSpec, NotInIdeal, OmegaResult, flat_oscillation, omega_decompose
from .patchwork import NormEstimate, PatchworkFunction
from .testpoly import build_test_polynomial, dn_probe, gamma_constant, verify_test_polynomial_bounds

__all__ = [
    "Extension",
    "ExtensionError",
    "IdealSpec",
    "NormEstimate",
    "NotInIdeal",
    "OmegaResult",
    "PatchworkFunction",
    "Sandwich",
    "build_test_polynomial",
    "construct_extension",
    "dn_probe",
    "flat_oscillation",
    "gamma_constant",
    "omega_decompose",
    "quotient_norm_sandwich",
    "separating_step",
    "verify_test_polynomial_bounds",
]

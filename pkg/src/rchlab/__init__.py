"""Numerical laboratory for a rotation-modified Camassa-Holm equation."""

from .coefficients import CubicRoot, ModelParams, derive_coefficients, solve_gamma_cubic
from .spectral import (Field, PeriodicGrid, ddx, field_from_binary, field_from_csv,
                       field_to_binary, field_to_csv, grad_p_conv, helmholtz_inverse,
                       product, synthesize)
from .littlewood_paley import (BesovIndex, DyadicFilterBank, besov_norm, block_norms,
                               build_filter_bank, dyadic_block, lp_norm,
                               sobolev_h_norm, w1p_norm)
from .eulerian import (SolverConfig, Trajectory, full_rhs, kappa_horizon,
                       picard_iterate, rhs_g, solve)

__all__ = [
    "BesovIndex", "CubicRoot", "DyadicFilterBank", "Field", "ModelParams",
    "PeriodicGrid", "SolverConfig", "Trajectory", "besov_norm", "block_norms",
    "build_filter_bank", "ddx", "derive_coefficients", "dyadic_block",
    "field_from_binary", "field_from_csv", "field_to_binary", "field_to_csv",
    "full_rhs", "grad_p_conv", "helmholtz_inverse", "kappa_horizon", "lp_norm",
    "picard_iterate", "product", "rhs_g", "sobolev_h_norm", "solve",
    "solve_gamma_cubic", "synthesize", "w1p_norm",
]

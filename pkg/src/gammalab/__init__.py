"""Numerical laboratory for the Property P constant of small Banach spaces."""

from .linalg import FieldTag, HermitianMatrix, SeededRng, hs_inner, is_psd, psd_sqrt, abs_entrywise, random_psd
from .spaces import SpaceSpec, parse_space, gauge, dual_gauge, boundary_point, extreme_point_census
from .opnorm import (
    NormSide,
    quad_form_sup,
    direct_quad_form_sup,
    naive_quad_form_sup,
    linf_to_l1_norm,
    l1_to_linf_norm,
)
from .config import OptimizerConfig
from .gamma import GammaReport, gamma, gamma_complex_direct, verify_theorem1, lower_bound_witness
from .correlation import CorrelationFactor, BetaReport, beta, rank1_beta, gamma_linf, extreme_rank_diagnostic

__all__ = [
    "FieldTag", "HermitianMatrix", "SeededRng", "hs_inner", "is_psd", "psd_sqrt", "abs_entrywise",
    "random_psd", "SpaceSpec", "parse_space", "gauge", "dual_gauge", "boundary_point",
    "extreme_point_census", "NormSide", "quad_form_sup", "direct_quad_form_sup",
    "naive_quad_form_sup", "linf_to_l1_norm", "l1_to_linf_norm", "OptimizerConfig",
    "GammaReport", "gamma", "gamma_complex_direct", "verify_theorem1", "lower_bound_witness",
    "CorrelationFactor", "BetaReport", "beta", "rank1_beta", "gamma_linf", "extreme_rank_diagnostic",
]

__version__ = "0.1.0"

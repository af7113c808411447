"""Effective rate of the fluctuating Beckmann fading channel.

Three mutually cross-validating routes to J = E[(1+gamma)^-A] and the
normalized rate R = -log2(J)/A: MGF quadrature, an exact partial-fraction
closed form via the Tricomi U function, and Monte-Carlo simulation of the
physical cluster channel.
"""

from .errors import (ClosedFormUnavailableError, ConvergenceError, FbrateError,
                     ParameterError)
from .mc import ClusterGeometry, McConfig, McEstimate, estimate_er, geometry_from_params, sample_snr
from .mgf import MgfPoint, log_mgf, mgf, mgf_mean_check
from .model import (DEFAULT_M_LARGE, ChannelParams, DerivedParams, PRESET_NAMES,
                    derive, preset, resolve_shadowing, validate)
from .poles import (PartialFractionExpansion, PoleSet, build_pole_set, decompose,
                    pdf, reconstruct, residues)
from .rate import (ErRequest, ErResult, closed_form_applies, effective_rate,
                   er_auto, expectation_closed_form, expectation_quadrature)
from .specfun import QuadratureRule, gauss_laguerre, ln_gamma, tricomi_u_int_a

__version__ = "0.1.0"

__all__ = [
    "ChannelParams", "DerivedParams", "MgfPoint", "PoleSet",
    "PartialFractionExpansion", "QuadratureRule", "ErRequest", "ErResult",
    "ClusterGeometry", "McConfig", "McEstimate",
    "validate", "derive", "preset", "resolve_shadowing", "DEFAULT_M_LARGE",
    "PRESET_NAMES", "mgf", "log_mgf", "mgf_mean_check",
    "build_pole_set", "residues", "decompose", "pdf", "reconstruct",
    "ln_gamma", "tricomi_u_int_a", "gauss_laguerre",
    "effective_rate", "expectation_quadrature", "expectation_closed_form",
    "er_auto", "closed_form_applies",
    "geometry_from_params", "sample_snr", "estimate_er",
    "FbrateError", "ParameterError", "ClosedFormUnavailableError",
    "ConvergenceError",
]

"""Infinitely divisible Gamma laws on R^d and on the cone of PSD matrices.

Submodules
----------
specfun       special functions (log-gamma, E1 and its inverse, multivariate gamma/beta, MP moments)
spectral      spherical measures alpha and scale functions beta
gamma_law     the law object, transforms, existence and moment checks, closure operations
matrix_gamma  AGamma, BGamma and matrix Gamma-Normal families
wiener_gamma  Thorin measures, h-rules and Wiener-Gamma integrals
sampler       exact, series and thinned samplers, paths, Wiener-Gamma simulation
mcstats       Monte-Carlo moment, KS and transform checks
lawspec       JSON law specifications
verify        the acceptance suite
cli           command-line interface
"""

from .errors import ConeGammaError, DomainError, MomentError, UnsupportedError, ValidationError
from .gamma_law import (
    GammaLaw,
    char_fn,
    convolve,
    covariance,
    existence_check,
    fourier_laplace_exists,
    laplace_transform,
    log_laplace,
    mean,
    moment_order_check,
    process_marginal,
    scale,
)
from .lawspec import LawSpec, SchemaError, load_spec, parse_spec
from .matrix_gamma import (
    AGammaParams,
    BGammaParams,
    GammaNormalParams,
    agamma_cov,
    agamma_law,
    agamma_mean,
    bgamma_law,
    gamma_normal_cf,
    mp_trace_asymptotics,
)
from .sampler import RngSpec, sample, sample_gamma_normal, sample_replicates, simulate_path, simulate_wiener_gamma
from .spectral import (
    ConstantScale,
    DiscreteMeasure,
    PerAtomScale,
    RankQProjectorMeasure,
    SequenceMeasure,
    SequenceScale,
    SigmaTraceScale,
    WishartInducedMeasure,
)
from .wiener_gamma import ThorinFunction, ThorinMeasure, h_to_thorin, thorin_to_h, yh_laplace

__version__ = "0.1.0"

__all__ = [
    "AGammaParams",
    "BGammaParams",
    "ConeGammaError",
    "ConstantScale",
    "DiscreteMeasure",
    "DomainError",
    "GammaLaw",
    "GammaNormalParams",
    "LawSpec",
    "MomentError",
    "PerAtomScale",
    "RankQProjectorMeasure",
    "RngSpec",
    "SchemaError",
    "SequenceMeasure",
    "SequenceScale",
    "SigmaTraceScale",
    "ThorinFunction",
    "ThorinMeasure",
    "UnsupportedError",
    "ValidationError",
    "WishartInducedMeasure",
    "agamma_cov",
    "agamma_law",
    "agamma_mean",
    "bgamma_law",
    "char_fn",
    "convolve",
    "covariance",
    "existence_check",
    "fourier_laplace_exists",
    "gamma_normal_cf",
    "h_to_thorin",
    "laplace_transform",
    "load_spec",
    "log_laplace",
    "mean",
    "moment_order_check",
    "mp_trace_asymptotics",
    "parse_spec",
    "process_marginal",
    "sample",
    "sample_gamma_normal",
    "sample_replicates",
    "scale",
    "simulate_path",
    "simulate_wiener_gamma",
    "thorin_to_h",
    "yh_laplace",
]

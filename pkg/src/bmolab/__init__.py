"""bmolab: mean-oscillation analysis, constructive dyadic approximation,
bilinear Calderon-Zygmund commutator quadrature, multiple weights, and a
Frechet-Kolmogorov compactness harness, at desk scale.

The hot bilinear quadrature loop runs on a compiled extension when built,
with a numpy fallback selected at import (see :mod:`bmolab._core`).
"""

from . import _core
from .errors import (
    BmolabError,
    EvalDomainError,
    ParseError,
    PreconditionError,
    ThresholdCertificationError,
)
from .expr import FunctionSpec, bump_at, catalog, parse_function, to_text
from .funcspace import Cube, SampledFunction, cube_average, default_resolution, midpoint_nodes
from .oscillation import (
    ClassifyResult,
    OscillationProfile,
    ScanConfig,
    annulus_profile,
    bmo_norm_estimate,
    classify,
    large_scale_profile,
    mean_oscillation,
    small_scale_profile,
    translation_profile,
)
from .report import __version__

BACKEND = _core.BACKEND

__all__ = [
    "BACKEND",
    "__version__",
    "BmolabError",
    "EvalDomainError",
    "ParseError",
    "PreconditionError",
    "ThresholdCertificationError",
    "FunctionSpec",
    "parse_function",
    "to_text",
    "catalog",
    "bump_at",
    "Cube",
    "SampledFunction",
    "cube_average",
    "midpoint_nodes",
    "default_resolution",
    "mean_oscillation",
    "bmo_norm_estimate",
    "OscillationProfile",
    "small_scale_profile",
    "translation_profile",
    "large_scale_profile",
    "annulus_profile",
    "classify",
    "ClassifyResult",
    "ScanConfig",
]

"""Exact and asymptotic statistics of random walks with resets.

Final altitude, height, and waiting-time laws for walks whose ticks either
jump by a step from a finite set or reset the altitude to zero; single
up-step (Moran) walks get closed rational generating functions, O(log n)
coefficient extraction, a discrete-Gumbel height limit with its Fourier
fluctuation series, and multidimensional population/soliton extensions.
"""

from .errors import (
    BranchPointProximity,
    ClassificationFailed,
    DegenerateReset,
    DegenerateRoots,
    EmptySupport,
    KernelZero,
    NonStochastic,
    NormalizationFailed,
    ResetWalksError,
    ResidualTooLarge,
    ResourceLimit,
)
from .model import (
    DistVector,
    LaurentPoly,
    StepModel,
    drift_moments,
    model_from_json,
    moran,
    step_polynomial,
    validate_model,
)

__version__ = "0.1.0"
__all__ = [
    "BranchPointProximity", "ClassificationFailed", "DegenerateReset",
    "DegenerateRoots", "DistVector", "EmptySupport", "KernelZero",
    "LaurentPoly", "NonStochastic", "NormalizationFailed", "ResetWalksError",
    "ResidualTooLarge", "ResourceLimit", "StepModel", "drift_moments",
    "model_from_json", "moran", "step_polynomial", "validate_model",
]

"""Numerical laboratory for sigma_k-Yamabe gluing on truncated cylinders."""

from .errors import (ConeExit, DegenerateFitError, DomainError, MaxIterError,
                     PositivityLoss, SigmaGlueError, SingularSystemError)
from .symfun import ArrowEndo, Dimensions, SpectrumEndo, elementary, newton_transform, sigma

__version__ = "0.1.0"

__all__ = [
    "ArrowEndo", "ConeExit", "DegenerateFitError", "Dimensions", "DomainError",
    "MaxIterError", "PositivityLoss", "SigmaGlueError", "SingularSystemError",
    "SpectrumEndo", "elementary", "newton_transform", "sigma",
]

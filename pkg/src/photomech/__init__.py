"""Finite-deformation electro-electronic-mechanical continuum kernel for photo-active matter."""
from .errors import (ConfigError, ConstraintViolation, NonConvergence, NonPositiveJacobian,
                     PhotomechError, SingularMatrix, UnknownField)

__version__ = "0.1.0"

__all__ = ["ConfigError", "ConstraintViolation", "NonConvergence", "NonPositiveJacobian",
           "PhotomechError", "SingularMatrix", "UnknownField", "__version__"]

"""Generalized spherical means on radial profiles: kernels, maximal operators and weighted bounds."""

from .errors import AccuracyError, DivergenceSignal, DomainError, SphermaxError

__version__ = "0.1.0"

__all__ = ["AccuracyError", "DivergenceSignal", "DomainError", "SphermaxError", "__version__"]

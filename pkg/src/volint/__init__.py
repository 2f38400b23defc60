"""Exact cocycles, pairings and volume computations for hyperbolic representations."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]

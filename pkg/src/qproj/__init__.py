"""Exact and floating-point tools for a four-parameter family of q-orthogonal polynomials."""

from .family import Params
from .qcore import Backend, MixedBackendError, q_binomial, q_factorial, q_number

__all__ = ["Backend", "MixedBackendError", "Params", "q_binomial", "q_factorial", "q_number"]
__version__ = "0.1.0"

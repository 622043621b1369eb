"""Tropical circuits, path-decomposition DP compilers, compatibility matrices
and the rectangle machinery for lower bounds on pure dynamic programming."""

from .circuit import Circuit, CircuitBuilder, calculates, evaluate, extract_polynomial, validate
from .errors import ScaleExceeded, VerificationFailure, WorkbenchError
from .poly import Flavor, Monomial, Polynomial

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "Flavor",
    "Monomial",
    "Polynomial",
    "ScaleExceeded",
    "VerificationFailure",
    "WorkbenchError",
    "calculates",
    "evaluate",
    "extract_polynomial",
    "validate",
]

"""Finite-dimensional approximations of the Weyl and resolvent CCR algebras."""
from .symplectic import SymplecticSpace, VecX, integer_span_membership, sigma
from .weyl import WeylElement, adjoint, l1_bound, multiply, trace, unit, weyl_gen

__version__ = "0.1.0"

__all__ = [
    "SymplecticSpace", "VecX", "sigma", "integer_span_membership",
    "WeylElement", "weyl_gen", "unit", "multiply", "adjoint", "trace", "l1_bound",
]

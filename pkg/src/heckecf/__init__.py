"""Slow continued-fraction maps over extended Hecke groups.

Exact construction of Farey-type maps from decorated trees, their dual
iterated function systems and attractors, Minkowski conjugacy functions,
joint spectral radii, invariant densities and natural-extension orbits.
"""

from .errors import BudgetError, DomainError, PrecisionExhausted
from .field import AlgebraicNumber, FieldSpec, make_field

__all__ = [
    "AlgebraicNumber",
    "BudgetError",
    "DomainError",
    "FieldSpec",
    "PrecisionExhausted",
    "make_field",
]

__version__ = "0.1.0"

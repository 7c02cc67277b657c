"""Exact-arithmetic toolkit for Poisson structures, Lie algebra cohomology,
low-order star products and the character obstruction they lead to."""

__version__ = "0.1.0"

from .poly import MultiVector, Polynomial, schouten, jacobi_check, coisotropy_check  # noqa: F401
from .lie import LieAlgebra  # noqa: F401

"""Polynomial and polynomial-matrix algebra."""

from .poly import (
    DEFAULT_EPS_ZERO,
    EXACT,
    TOLERANT,
    Polynomial,
    poly_ext_gcd,
    poly_gcd,
)
from .matrix import (
    PolyMatrix,
    is_left_unimodular,
    left_inverse,
    poly_matrix_det,
    poly_matrix_mul,
    row_reduce_upper,
)
from .canonical import CanonicalForm, kernel_from_md, kronecker_hermite

__all__ = [
    "DEFAULT_EPS_ZERO",
    "EXACT",
    "TOLERANT",
    "Polynomial",
    "PolyMatrix",
    "CanonicalForm",
    "is_left_unimodular",
    "kernel_from_md",
    "kronecker_hermite",
    "left_inverse",
    "poly_ext_gcd",
    "poly_gcd",
    "poly_matrix_det",
    "poly_matrix_mul",
    "row_reduce_upper",
]

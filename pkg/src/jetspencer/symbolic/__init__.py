"""Exact arithmetic: polynomials, polynomial fractions, truncated series, linear algebra."""
from .linalg import ExactMatrix, exact_kernel, exact_rank, primitive_integer, rref
from .multiindex import MultiIndex
from .poly import Poly, format_poly, parse_poly, poly_diff
from .ratfunc import RatFunc, format_ratfunc, parse_ratfunc, to_ratfunc
from .series import Series, SeriesRing

__all__ = [
    "ExactMatrix",
    "MultiIndex",
    "Poly",
    "RatFunc",
    "Series",
    "SeriesRing",
    "exact_kernel",
    "exact_rank",
    "format_poly",
    "format_ratfunc",
    "parse_poly",
    "parse_ratfunc",
    "poly_diff",
    "primitive_integer",
    "rref",
    "to_ratfunc",
]

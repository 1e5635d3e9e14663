"""Polyharmonic functions on the unit ball: exact operator calculus, cellular
decomposition, kernels, weighted quadrature and critical exponent curves."""

from .exactpoly import ExactPolynomial, emit_json, parse_json

__all__ = ["ExactPolynomial", "emit_json", "parse_json"]
__version__ = "0.1.0"

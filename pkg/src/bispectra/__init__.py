"""Exact toolkit for Bochner-type d-orthogonal polynomial families.

Polynomials, dual functionals and moments; second-kind functions and their
expansions; Grassmannian planes and tau series; Virasoro operators;
pseudo-difference Lax operators.
"""
from .family import FamilyConfig, generate_polynomial, verify_bispectrality

__all__ = ["FamilyConfig", "generate_polynomial", "verify_bispectrality"]
__version__ = "0.1.0"

"""Hyperbolic cone manifold structures: domains, deformations, verification."""

__version__ = "0.1.0"

"""Numerical experiments on mirror-symmetric plane sections of convex bodies."""

__version__ = "0.1.0"

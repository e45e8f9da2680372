"""Heavenly-type equations: coefficient catalog, symmetry recursions, solution lifts and metrics."""

__version__ = "0.1.0"

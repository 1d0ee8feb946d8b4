"""Exact Atiyah classes, Hochschild (co)homology and Riemann-Roch checks on projective spaces."""

__version__ = "0.1.0"

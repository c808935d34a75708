"""Desk-scale coarse geometry: stability, contraction, products and the
once-punctured torus."""

__version__ = "0.1.0"

"""Exact computation with ring extensions, flat and invertible ideals, and Prüfer-type properties."""

__version__ = "0.1.0"

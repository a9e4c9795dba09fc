"""Exact algebra for the Witt and Virasoro algebras, local functions and Poisson cores."""

__version__ = "0.1.0"

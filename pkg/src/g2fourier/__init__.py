"""Exact arithmetic for Fourier coefficients of the weight 1/2 modular form on G2."""

__version__ = "0.1.0"

"""Toeplitz operators on true-poly-analytic Bergman spaces through their
Laguerre-wavelet (time-scale) models."""

__version__ = "0.1.0"

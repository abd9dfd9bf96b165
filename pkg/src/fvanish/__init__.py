"""Numerical toolkit for functions whose Fourier transform vanishes on a hypersurface."""

__version__ = "0.1.0"

"""Numerical checks of exponential integrability inequalities."""

__version__ = "0.1.0"

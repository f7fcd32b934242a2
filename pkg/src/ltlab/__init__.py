"""Numerical laboratory for Lieb-Thirring and kinetic-energy inequalities."""

__version__ = "0.1.0"

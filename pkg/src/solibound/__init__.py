"""Explicit solutions to integrable boundary problems for KP and the 2D Toda lattice."""

__version__ = "0.1.0"

"""Finite-size scaling of spin coherent states in collective spin models."""

__version__ = "0.1.0"

"""Variational linear quantum models for functions on the Boolean cube."""

__version__ = "0.1.0"

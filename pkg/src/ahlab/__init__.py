"""Numerical laboratory for almost Hermitian geometry."""

__version__ = "0.1.0"

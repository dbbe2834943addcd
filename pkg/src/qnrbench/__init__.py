"""Quadratic-nonresidue sampling benchmark toolkit."""

__version__ = "0.1.0"

"""Numerical criteria for the smooth extension property of compact K in R."""

__version__ = "0.1.0"

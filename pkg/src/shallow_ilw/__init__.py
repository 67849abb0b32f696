"""Numerical toolkit for the scaled intermediate long wave equation and its KdV limit."""

__version__ = "0.1.0"

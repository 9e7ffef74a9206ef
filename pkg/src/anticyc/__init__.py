"""Exact and p-adic tools for anticyclotomic Euler systems over imaginary quadratic fields."""

__version__ = "0.1.0"

"""Exact arithmetic for Eisenstein congruences, Heegner-point rank criteria and twist densities."""

__version__ = "1.0.0"

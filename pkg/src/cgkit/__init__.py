"""Clebsch-Gordan varieties for the Kleinian groups of type A and D."""

__version__ = "0.1.0"

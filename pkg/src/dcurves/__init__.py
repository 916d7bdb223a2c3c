"""Darboux frames of curves in Minkowski 3-space and their offset partners."""

__version__ = "0.1.0"

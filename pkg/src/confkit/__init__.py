"""Exact computations with Lie conformal superalgebras of type W and S."""

__version__ = "0.1.0"

"""Exact computations on genus-two translation surfaces."""

__version__ = "0.1.0"

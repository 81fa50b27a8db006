"""Exact and p-adic computations for lifting cyclic covers."""

__version__ = "0.1.0"

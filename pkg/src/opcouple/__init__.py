"""Exact witnesses for equivalence after extension and Schur coupling."""

__version__ = "0.1.0"

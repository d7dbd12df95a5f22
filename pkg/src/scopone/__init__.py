"""Scopone: rules engine, artificial players, and experiment harness."""

__version__ = "0.1.0"

"""Separation-logic toolkit for a small heap-manipulating language."""

__version__ = "0.1.0"

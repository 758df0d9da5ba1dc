"""Contextual don't-know responses from dependency templates."""

__version__ = "0.1.0"

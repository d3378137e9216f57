"""Exact certificates for complete Pick and complete Caratheodory kernel pairs."""

__version__ = "0.1.0"

"""Boundary Gaudin magnets, BCD Calogero-Moser models, and their duality."""

__version__ = "0.1.0"

"""Desk-scale numerics for Dyson-type interacting Brownian motions on configuration space."""

__version__ = "0.1.0"

"""Grover-minimization lab: orbit representatives, circuits, noisy simulation."""

__version__ = "0.1.0"

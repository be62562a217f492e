"""Exact steady states and synchronization measures for chains of spin-1 oscillators."""

__version__ = "0.1.0"

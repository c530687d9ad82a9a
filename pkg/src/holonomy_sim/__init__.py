"""Pulse-level simulation of three-segment super-robust holonomic gates."""
__version__ = "0.1.0"

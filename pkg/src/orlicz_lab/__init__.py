"""Orlicz-space toolkit on the finite group Z_N^d."""

__version__ = "0.1.0"

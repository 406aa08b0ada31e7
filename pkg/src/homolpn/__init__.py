"""Homophonic coding ahead of error correction and a linear stream cipher,
and the chosen-plaintext reduction of key recovery to LPN."""

__version__ = "0.1.0"

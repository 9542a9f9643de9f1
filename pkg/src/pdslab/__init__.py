"""Partial difference sets on twisted GF(4) groups and the non-abelian
regular groups built from their isometries."""

__version__ = "0.1.0"

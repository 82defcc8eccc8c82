"""Exact certificates for finite group-algebra twist computations over SL2, PSL2, SL3 and Sz."""

__version__ = "0.1.0"

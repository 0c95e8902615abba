"""Spin-cuts, Arf invariants and Dirac eigenvalue lower bounds on surfaces."""

__version__ = "0.1.0"

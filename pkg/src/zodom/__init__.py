"""Exact-arithmetic toolkit for Z^d odometers.

Subgroups Z^d <= H <= Q^d parametrize Z^d-odometers; this package computes
their finite approximants, first cohomology and trace invariants, and decides
conjugacy, isomorphism, continuous orbit equivalence and orbit equivalence.
"""

__version__ = "0.1.0"

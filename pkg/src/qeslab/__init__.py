"""Exact laboratory for 2x2 matrix differential operators preserving
polynomial doublets.

Normal-ordered Weyl-algebra arithmetic over Q[k0], constructors for the
graded operator families that act on P(m) (+) P(n), exact verification of
their (super)commutation relations, and the algebraic spectrum of the
associated matrix Schroedinger operator, cross-checked numerically.
"""

from qeslab import exactnum, generators, spectral, verify, weyl  # noqa: F401

__all__ = ["exactnum", "weyl", "generators", "verify", "spectral"]
__version__ = "0.1.0"

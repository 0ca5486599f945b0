"""
loopk - Exact K-theory computations for loop groups

- core: Laurent polynomials, q-series, Smith normal form, expression grammar
- services: affine Weyl geometry, representation rings, Verlinde colimits,
  formal group laws and the sigma orientation, genera and Tate localization
- cli: JSON command-line front end
"""

__version__ = "0.1.0"

"""
Exact arithmetic core: Laurent polynomials, truncated q-series,
Smith normal form and the expression grammar.
"""

from loopk.core.laurent import LaurentPoly, lp_arith, lp_exact_divide
from loopk.core.parsing import parse_poly, parse_series, render_poly, render_series
from loopk.core.qseries import QLaurentSeries, qs_invert, qs_mul
from loopk.core.smith import SmithForm, lattice_membership, smith_normal_form

__all__ = [
    'LaurentPoly',
    'QLaurentSeries',
    'SmithForm',
    'lp_arith',
    'lp_exact_divide',
    'qs_mul',
    'qs_invert',
    'smith_normal_form',
    'lattice_membership',
    'parse_poly',
    'parse_series',
    'render_poly',
    'render_series',
]

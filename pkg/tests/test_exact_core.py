"""
Tests for the exact core: coefficients, Laurent polynomials, q-series,
parsing and Smith normal form.

sympy is the reference for polynomial arithmetic and invariant factors.
"""

import random
from fractions import Fraction

import pytest
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import invariant_factors

from loopk.core.coefficients import normalize, render_decimal, to_coefficient
from loopk.core.laurent import LaurentPoly, lp_exact_divide
from loopk.core.parsing import parse_poly, parse_series, render_poly, render_series
from loopk.core.qseries import QLaurentSeries, qs_invert
from loopk.core.smith import lattice_membership, smith_normal_form
from loopk.errors import (
    InputError,
    NonExactDivisionError,
    NonUnitError,
    QWindowError,
    VariableMismatchError,
)


UZ = ("u", "z")
U, Z = sympy.symbols("u z")


def random_poly(rng: random.Random, variables=UZ, terms: int = 5, spread: int = 3) -> LaurentPoly:
    coeffs = {}
    for _ in range(terms):
        exps = tuple(rng.randint(-spread, spread) for _ in variables)
        coeffs[exps] = rng.randint(-4, 4)
    return LaurentPoly(variables, coeffs)


def to_sympy(poly: LaurentPoly):
    return sympy.sympify(render_poly(poly).replace("^", "**"), locals={"u": U, "z": Z})


# ============================================================================
# COEFFICIENTS
# ============================================================================

@pytest.mark.parametrize("text,expected", [
    ("3", 3),
    ("-1/8", Fraction(-1, 8)),
    ("0.3", Fraction(3, 10)),
    ("4/2", 2),
])
def test_to_coefficient_parses_exact_values(text, expected):
    value = to_coefficient(text)
    assert value == expected
    assert type(value) is type(expected)


def test_floats_are_rejected():
    with pytest.raises(InputError):
        to_coefficient(0.3)


def test_normalize_collapses_integral_fractions():
    assert normalize(Fraction(6, 3)) == 2
    assert isinstance(normalize(Fraction(6, 3)), int)


@pytest.mark.parametrize("value,expected", [
    (Fraction(3, 10), "0.3"),
    (Fraction(-1, 8), "-0.125"),
    (Fraction(1, 3), "1/3"),
    (Fraction(7, 1), "7"),
])
def test_render_decimal(value, expected):
    assert render_decimal(value) == expected


# ============================================================================
# LAURENT POLYNOMIALS
# ============================================================================

def test_arithmetic_matches_sympy():
    rng = random.Random(20240611)
    for _ in range(40):
        a, b = random_poly(rng), random_poly(rng)
        assert sympy.expand(to_sympy(a + b) - (to_sympy(a) + to_sympy(b))) == 0
        assert sympy.expand(to_sympy(a - b) - (to_sympy(a) - to_sympy(b))) == 0
        assert sympy.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


def test_ring_axioms_on_random_elements():
    rng = random.Random(7)
    for _ in range(25):
        a, b, c = random_poly(rng), random_poly(rng), random_poly(rng)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert a - a == LaurentPoly.zero(UZ)


def test_exact_division_recovers_factor():
    rng = random.Random(99)
    for _ in range(20):
        a = random_poly(rng)
        b = random_poly(rng)
        if b.is_zero:
            continue
        assert lp_exact_divide(a * b, b) == a


def test_non_exact_division_carries_quotient_and_remainder():
    num = parse_poly("u^2 + 1", UZ)
    den = parse_poly("u + 1", UZ)
    with pytest.raises(NonExactDivisionError) as info:
        lp_exact_divide(num, den)
    error = info.value
    assert error.quotient * den + error.remainder == num


def test_variable_lists_must_match():
    a = LaurentPoly.variable(UZ, "u")
    b = LaurentPoly.variable(("u",), "u")
    with pytest.raises(VariableMismatchError):
        a + b


def test_negative_powers_only_for_monomials():
    z = LaurentPoly.variable(UZ, "z")
    assert z ** -2 * z ** 2 == 1
    with pytest.raises(InputError):
        (z + 1) ** -1


def test_adams_and_substitution():
    s = parse_poly("u + u^-1", UZ)
    assert s.adams(2) == parse_poly("u^2 + u^-2", UZ)
    assert s.invert_variable("u") == s
    assert s.substitute("u", 2) == parse_poly("5/2", UZ)
    assert s.evaluate({"u": 1, "z": 7}) == 2


# ============================================================================
# PARSING AND RENDERING
# ============================================================================

def test_parse_and_render_canonical_order():
    poly = parse_poly("u^-3 + u^-1 + u + u^3", ("u",))
    assert render_poly(poly) == "u^3 + u + u^-1 + u^-3"
    assert render_poly(poly, compact=True) == "u^3+u+u^-1+u^-3"


def test_parse_exact_polynomial_division():
    poly = parse_poly("(z - z*u^-4)/(1 - u^-2)", UZ)
    assert poly == parse_poly("z + z*u^-2", UZ)


def test_parse_rejects_unknown_names():
    with pytest.raises(InputError):
        parse_poly("x + 1", UZ)


def test_render_round_trip_is_stable():
    rng = random.Random(3)
    for _ in range(20):
        poly = random_poly(rng)
        text = render_poly(poly)
        assert render_poly(parse_poly(text, UZ)) == text


def test_series_rendering():
    series = parse_series("1 - L*q^2", ("L",), order=4)
    assert render_series(series) == "1 + (-L)*q^2"
    assert series.order == 4


def test_zero_series_renders_as_zero():
    assert render_series(QLaurentSeries.zero(("L",), 3)) == "0"


def test_series_render_round_trip():
    rng = random.Random(500)
    for _ in range(100):
        order = rng.randint(0, 6)
        coeffs = {d: random_poly(rng, variables=("L",), terms=3) for d in range(rng.randint(-3, 0), order + 1)}
        series = QLaurentSeries(("L",), coeffs, order)
        assert parse_series(render_series(series), ("L",), order=order) == series


# ============================================================================
# Q-SERIES
# ============================================================================

def test_geometric_inverse():
    one_minus_q = QLaurentSeries(("L",), {0: 1, 1: -1}, None)
    inverse = qs_invert(one_minus_q, order=10)
    assert inverse.order == 10
    assert all(inverse.coefficient(d) == 1 for d in range(11))


def test_exact_multi_term_inverse_needs_order():
    series = QLaurentSeries(("L",), {0: 1, 1: -1}, None)
    with pytest.raises(QWindowError):
        qs_invert(series)


def test_exact_monomial_inverse_stays_exact():
    series = QLaurentSeries.q_power(("L",), 3, LaurentPoly.variable(("L",), "L"))
    inverse = qs_invert(series)
    assert inverse.is_exact
    assert inverse * series == QLaurentSeries.one(("L",))


def test_product_precision():
    a = QLaurentSeries(("L",), {2: 1, 3: 1}, 5)
    b = QLaurentSeries(("L",), {0: 1, 1: 2}, 7)
    assert (a * b).order == 5


def test_positive_valuation_product_gains_precision():
    a = QLaurentSeries(("L",), {1: 1, 2: 3}, 4)
    b = QLaurentSeries(("L",), {2: 1}, 3)
    product = a * b
    assert product.order == 4
    assert product == QLaurentSeries(("L",), {3: 1, 4: 3}, 4)
    completed = QLaurentSeries(("L",), {1: 1, 2: 3, 5: 1}, None) * QLaurentSeries(("L",), {2: 1, 4: 1}, None)
    assert completed.truncate(4) == product


def test_truncated_inverse_order():
    a = QLaurentSeries(("L",), {1: 1, 2: 1}, 6)
    inverse = qs_invert(a)
    assert inverse.order == 4
    assert (a * inverse).agrees_with(QLaurentSeries.one(("L",)), through=4)


def test_non_unit_series():
    with pytest.raises(NonUnitError):
        qs_invert(QLaurentSeries(("L",), {0: 2, 1: 1}, 5))
    with pytest.raises(NonUnitError):
        qs_invert(QLaurentSeries.zero(("L",), 5))


def test_coefficient_beyond_order():
    series = QLaurentSeries.one(("L",), 3)
    assert series.coefficient(3) == 0
    with pytest.raises(QWindowError):
        series.coefficient(4)


# ============================================================================
# SMITH NORMAL FORM
# ============================================================================

def test_known_invariant_factors():
    form = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert form.invariant_factors == (2, 6, 12)


def test_invariant_factors_match_sympy():
    m = [[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]]
    form = smith_normal_form(m)
    reference = sorted(abs(int(d)) for d in invariant_factors(DM(m, ZZ)) if d != 0)
    assert list(form.invariant_factors) == reference == [1, 10, 30]
    assert form.free_rank == 1


def test_transforms_diagonalize():
    rng = random.Random(11)
    for _ in range(15):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        m = [[rng.randint(-6, 6) for _ in range(cols)] for _ in range(rows)]
        form = smith_normal_form(m)
        assert sympy.Matrix(form.left) * sympy.Matrix(m) * sympy.Matrix(form.right) == sympy.Matrix(form.diagonal)
        assert abs(sympy.Matrix(form.left).det()) == abs(sympy.Matrix(form.right).det()) == 1
        factors = form.invariant_factors
        assert all(b % a == 0 for a, b in zip(factors, factors[1:]))
        if rows == cols:
            det = abs(int(sympy.Matrix(m).det()))
            product = 1
            for d in factors:
                product *= d
            assert (product if len(factors) == rows else 0) == det


def test_lattice_membership():
    form = smith_normal_form([[2, 0], [0, 3]])
    assert lattice_membership(form, [4, 3])
    assert not lattice_membership(form, [1, 0])
    assert form.invariant_factors == (1, 6)
    assert form.torsion == (6,)


def test_zero_column_matrix_needs_rows():
    form = smith_normal_form([], rows=3)
    assert form.free_rank == 3
    assert not form.cokernel_is_zero

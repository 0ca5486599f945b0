"""
Tests for Chern data, sigma-type genera, the TFT invariants and Tate localization.
"""

from fractions import Fraction

import pytest
import sympy

from loopk.core.parsing import parse_poly
from loopk.core.qseries import QLaurentSeries
from loopk.errors import InputError, MissingChernNumberError
from loopk.services.genus_service import (
    ChernData,
    chern_product,
    create_genus_service,
    parse_partition,
    partitions,
    render_partition,
    series_coefficients,
)


@pytest.fixture(scope="module")
def genus():
    return create_genus_service()


@pytest.fixture
def k3():
    return ChernData.from_payload(2, {"c1^2": 0, "c2": 24})


@pytest.fixture
def cp2():
    return ChernData.from_payload(2, {"c1^2": 9, "c2": 3})


def q_poly(text: str):
    return parse_poly(text, ("q",))


# ============================================================================
# CHERN DATA
# ============================================================================

def test_partitions():
    assert partitions(0) == [()]
    assert partitions(3) == [(3,), (2, 1), (1, 1, 1)]
    assert len(partitions(6)) == 11


@pytest.mark.parametrize("key,expected", [
    ("c1^2*c2", (2, 1, 1)),
    ("c2*c1", (2, 1)),
    ("c3", (3,)),
    ("1", ()),
])
def test_parse_partition(key, expected):
    assert parse_partition(key) == expected


def test_render_partition():
    assert render_partition((2, 1, 1)) == "c1^2*c2"
    assert render_partition(()) == "1"


@pytest.mark.parametrize("key", ["d2", "c0", "c1^x", "c1+c2"])
def test_malformed_chern_monomials(key):
    with pytest.raises(InputError):
        parse_partition(key)


def test_chern_degree_must_match_dimension():
    with pytest.raises(InputError):
        ChernData.from_payload(2, {"c1": 3})


def test_product_of_projective_lines():
    line = ChernData.from_payload(1, {"c1": 2})
    product = chern_product(line, line)
    assert product.numbers == {(1, 1): 8, (2,): 4}


def test_disjoint_union_adds_numbers(k3):
    union = k3 + k3
    assert union.number((2,)) == 48
    assert union.number((1, 1)) == 0
    with pytest.raises(InputError):
        k3 + ChernData.point()


def test_missing_chern_numbers(genus):
    partial = ChernData.from_payload(2, {"c2": 24})
    assert partial.missing() == [(1, 1)]
    with pytest.raises(MissingChernNumberError):
        genus.witten_genus(partial, 2)


# ============================================================================
# DENSITIES
# ============================================================================

def test_abs_density_coefficients(genus):
    density = genus.density_from_orientation("abs", 4, 0)
    coefficients = density.q_slice(0)
    assert coefficients[0] == 1
    assert coefficients[2] == Fraction(-1, 24)
    assert coefficients[4] == Fraction(7, 5760)
    assert density.is_even


def test_sigma_density_is_even_with_unit_constant_term(genus):
    density = genus.density_from_orientation("sigma", 6, 3)
    assert density.is_even
    assert density.constant_term == QLaurentSeries.one((), 3)


def test_density_rejects_bad_arguments(genus):
    with pytest.raises(InputError):
        genus.density_from_orientation("todd", 2, 2)
    with pytest.raises(InputError):
        genus.density_from_orientation("sigma", 0, 2)
    with pytest.raises(InputError):
        genus.density_from_orientation("sigma", 2, 2, genus=-1)


# ============================================================================
# GENERA
# ============================================================================

def test_a_hat_of_cp2(genus, cp2):
    assert genus.a_hat_genus(cp2) == Fraction(-1, 8)


def test_k3_witten_genus(genus, k3):
    series = genus.witten_genus(k3, 4)
    assert series_coefficients(series) == ["2", "-48", "-144", "-192", "-336"]
    assert genus.a_hat_genus(k3) == 2


def test_witten_genus_of_cp2_starts_with_a_hat(genus, cp2):
    series = genus.witten_genus(cp2, 3)
    assert series.coefficient(0).constant_value == Fraction(-1, 8)


@pytest.mark.parametrize("manifold", [
    ChernData.from_payload(1, {"c1": 2}),
    ChernData.from_payload(2, {"c1^2": 0, "c2": 0}),
])
def test_vanishing_witten_genus(genus, manifold):
    assert genus.witten_genus(manifold, 5).is_zero


def test_point(genus):
    assert genus.witten_genus(ChernData.point(), 3) == QLaurentSeries.constant((), 1, 3)


def test_witten_genus_is_additive(genus, k3, cp2):
    assert genus.witten_genus(k3 + cp2, 3) == genus.witten_genus(k3, 3) + genus.witten_genus(cp2, 3)


def expanded_x2_coefficients(q_order: int):
    """[x^2] of (x/2)/sinh(x/2) prod_n (1 - q^n)^2 / ((1 - q^n e^x)(1 - q^n e^-x)), expanded by sympy"""
    x, q = sympy.symbols("x q")
    factors = [(x / 2) / sympy.sinh(x / 2)]
    for n in range(1, q_order + 1):
        factors.append((1 - q**n) ** 2 / ((1 - q**n * sympy.exp(x)) * (1 - q**n * sympy.exp(-x))))
    x2 = sympy.expand(sympy.prod(sympy.series(f, x, 0, 3).removeO() for f in factors)).coeff(x, 2)
    expansion = sympy.expand(sympy.series(x2, q, 0, q_order + 1).removeO())
    return [Fraction(str(sympy.Rational(expansion.coeff(q, n)))) for n in range(q_order + 1)]


@pytest.mark.parametrize("manifold", ["k3", "cp2"])
def test_witten_genus_matches_expanded_product(genus, manifold, request):
    data = request.getfixturevalue(manifold)
    p1 = data.number((1, 1)) - 2 * data.number((2,))
    expected = QLaurentSeries((), {n: p1 * c for n, c in enumerate(expanded_x2_coefficients(3))}, 3)
    assert genus.witten_genus(data, 3) == expected


def test_genus_zero_tft_is_the_witten_genus(genus, k3):
    assert genus.tft_invariant(k3, 0, 4) == genus.witten_genus(k3, 4)


def test_genus_one_tft_is_reported_next_to_euler_characteristic(genus, k3):
    assert series_coefficients(genus.tft_invariant(k3, 1, 4)) == ["2", "0", "0", "0", "0"]
    report = genus.tft_report(k3, 1, 4)
    assert report["euler_characteristic"] == 24
    assert report["coefficients"][0] == "2"
    assert "euler_characteristic" not in genus.tft_report(k3, 2, 2)


# ============================================================================
# TATE LOCALIZATION
# ============================================================================

@pytest.mark.parametrize("n", range(0, 11))
def test_orbit_vanishes_after_base_change(genus, n):
    module = genus.khat_orbit(n, 100)
    assert module.is_zero
    assert module.certificate["verified_through"] == 100


def test_orbit_rejects_negative_order(genus):
    with pytest.raises(InputError):
        genus.khat_orbit(-1, 10)


@pytest.mark.parametrize("matrix,verdict,rank", [
    ([["q^2 - 1"]], "zero", 0),
    ([[]], "free", 1),
    ([["q - 1"], ["0"]], "free", 1),
    ([["1 + 2*q", "q"], ["3", "q^3 - 1"]], "zero", 0),
])
def test_tate_verdicts(genus, matrix, verdict, rank):
    module = genus.tate_base_change([[q_poly(e) for e in row] for row in matrix])
    assert module.verdict == verdict
    assert module.rank == rank


def test_tate_without_units_is_undecided(genus):
    module = genus.tate_base_change([[q_poly("2")]])
    assert not module.decided
    assert module.rank is None
    assert "diagnostic" in module.to_dict()


def test_tate_rejects_ragged_matrices(genus):
    with pytest.raises(InputError):
        genus.tate_base_change([[q_poly("q")], []])


def test_only_fixed_points_survive(genus):
    module = genus.localize_space(["fixed", "2", "free"])
    assert module.verdict == "free"
    assert module.rank == 1
    assert module.certificate["fixed_points"] == 1


def test_free_space_localizes_to_zero(genus):
    assert genus.localize_space(["free", "3", "z/5"]).is_zero


@pytest.mark.parametrize("cell", ["0", "orbit", "-2"])
def test_bad_cells(genus, cell):
    with pytest.raises(InputError):
        genus.localize_space([cell])

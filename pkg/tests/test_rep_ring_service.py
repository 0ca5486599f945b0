"""
Tests for torus characters, symmetric powers and holomorphic induction.

The SU(2) pushforward tables are checked in closed form; SU(3) characters
are checked against the Weyl dimension formula.
"""

import random
from fractions import Fraction

import pytest

from loopk.core.laurent import LaurentPoly
from loopk.errors import NotInvariantError
from loopk.services.rep_ring_service import create_rep_ring_service
from loopk.services.weyl_service import AlcovePoint


@pytest.fixture(scope="module")
def su2():
    return create_rep_ring_service("su2")


@pytest.fixture(scope="module")
def su3():
    return create_rep_ring_service("su3")


def z_over_u(rep, k: int) -> LaurentPoly:
    """(z/u)^k for k > 0, (u/z)^-k for k < 0"""
    return rep.monomial((-k,), k)


# ============================================================================
# SYMMETRIC POWERS
# ============================================================================

def test_sym_powers_of_standard_rep(su2):
    assert su2.standard_sym(2) == su2.parse("u^2 + 1 + u^-2")
    assert su2.standard_sym(0) == 1
    assert su2.standard_sym(-1).is_zero
    assert su2.standard_sym(5) == su2.parse("u^5 + u^3 + u + u^-1 + u^-3 + u^-5")


def test_sym_power_of_three_weights(su3):
    c = su3.parse("u1 + u1^-1*u2 + u2^-1")
    sym2 = su3.sym_power(c, 2)
    assert len(sym2) == 6
    assert sym2.evaluate({"u1": 1, "u2": 1, "z": 1}) == 6


# ============================================================================
# WEYL ACTION
# ============================================================================

def test_s1_fixes_the_standard_character(su2):
    s = su2.parse("u + u^-1")
    assert su2.weyl_act([1], s) == s


def test_s0_on_z(su2):
    assert su2.weyl_act([0], su2.parse("z")) == su2.parse("u^-2*z")


def test_generators_are_involutions(su3):
    rng = random.Random(5)
    for _ in range(10):
        weight = (rng.randint(-4, 4), rng.randint(-4, 4))
        c = su3.monomial(weight, rng.randint(-3, 3))
        for i in range(3):
            assert su3.weyl_act([i, i], c) == c


@pytest.mark.parametrize("indices,text,expected", [
    ("", "u", True),
    ("1", "u", False),
    ("0", "z*u^-1*(u + u^-1)", True),
    ("0", "z", False),
])
def test_invariance_check(su2, indices, text, expected):
    assert su2.invariance_check(indices, su2.parse(text)) is expected


def test_restrict_rejects_non_invariant(su2):
    with pytest.raises(NotInvariantError):
        su2.restrict("1", su2.parse("u"))


def monomial_at(rep, point: AlcovePoint, level: int) -> LaurentPoly:
    """The character e^lambda z^b sitting at the alcove point h = -lambda / b"""
    weight = [-level * h for h in point.coords]
    assert all(w.denominator == 1 for w in weight)
    return rep.monomial(tuple(int(w) for w in weight), level)


@pytest.mark.parametrize("group", ["su2", "su3", "su4"])
def test_weyl_act_matches_point_reflections(group):
    # simply-laced: the weight and coweight coordinates are identified directly
    rep = create_rep_ring_service(group)
    weyl = rep.weyl
    rng = random.Random(17)
    for _ in range(20):
        level = rng.choice([-3, -2, -1, 1, 2, 3])
        weight = tuple(rng.randint(-12, 12) for _ in range(weyl.rank))
        point = AlcovePoint(tuple(Fraction(-a, level) for a in weight))
        character = rep.monomial(weight, level)
        assert monomial_at(rep, point, level) == character
        for i in range(weyl.rank + 1):
            assert rep.weyl_act([i], character) == monomial_at(rep, weyl.reflect_point(i, point), level)
        folded, word = weyl.affine_fold(point)
        assert rep.weyl_act(word, monomial_at(rep, folded, level)) == character


def test_s0_level_bridge_on_su2(su2):
    # u^a z^b at t = -a/b; s0 is t -> 2 - t, i.e. u^a z^b -> u^(-a-2b) z^b
    weyl = su2.weyl
    point = AlcovePoint.parse("1.7")
    folded, word = weyl.affine_fold(point)
    assert word == (0,)
    assert su2.weyl_act(word, su2.parse("u^-3*z^10")) == su2.parse("u^-17*z^10")
    assert folded == AlcovePoint.parse("0.3")


# ============================================================================
# PUSHFORWARD TABLES
# ============================================================================

@pytest.mark.parametrize("k", range(1, 9))
def test_phi1_table(su2, k):
    assert su2.induction("1", su2.monomial((0,), k)) == su2.monomial((0,), k)
    assert su2.induction("1", su2.monomial((-1,), k)).is_zero


@pytest.mark.parametrize("k", range(1, 9))
def test_phi0_positive_table(su2, k):
    assert su2.induction("0", su2.monomial((0,), k)) == z_over_u(su2, k) * su2.standard_sym(k)
    assert su2.induction("0", su2.monomial((-1,), k)) == z_over_u(su2, k) * su2.standard_sym(k - 1)


@pytest.mark.parametrize("k", range(1, 9))
def test_phi0_negative_table(su2, k):
    assert su2.induction("0", su2.monomial((0,), -k)) == -(z_over_u(su2, -k) * su2.standard_sym(k - 2))
    assert su2.induction("0", su2.monomial((-1,), -k)) == -(z_over_u(su2, -k) * su2.standard_sym(k - 1))


def test_pushforward_rendering(su2):
    image = su2.induction("0", su2.parse("z^3"))
    assert su2.render_parabolic("0", image) == "(z/u)^3·(u^3+u+u^-1+u^-3)"


def test_induction_lands_in_parabolic_ring(su3):
    rng = random.Random(17)
    for indices in ("1", "2", "0", "0,1", "1,2"):
        for _ in range(5):
            c = su3.monomial((rng.randint(-3, 3), rng.randint(-3, 3)), rng.randint(-2, 2))
            assert su3.invariance_check(indices, su3.induction(indices, c))


def test_induction_is_a_module_map(su2):
    rng = random.Random(23)
    invariants = {"0": [su2.parse("u + u^-1"), su2.parse("z*u^-1")], "1": [su2.parse("u + u^-1"), su2.parse("z")]}
    for indices, ring in invariants.items():
        for _ in range(8):
            c = su2.monomial((rng.randint(-4, 4),), rng.randint(-3, 3))
            for r in ring:
                assert su2.induction(indices, r * c) == r * su2.induction(indices, c)


@pytest.mark.parametrize("a,b", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (3, 2)])
def test_su3_weyl_dimension(su3, a, b):
    character = su3.induction("1,2", su3.monomial((a, b), 0))
    assert character.evaluate({"u1": 1, "u2": 1, "z": 1}) == (a + 1) * (b + 1) * (a + b + 2) // 2
    assert all(c > 0 for c in character.terms.values())


@pytest.mark.parametrize("m", range(0, 6))
def test_dominant_characters_are_positive(su2, m):
    for k in (-2, 1, 3):
        image = su2.induction("1", su2.monomial((m,), k))
        assert all(c >= 0 for c in image.terms.values())


def test_parabolic_ring_generators(su2):
    ring = su2.parabolic_ring("0")
    assert su2.parse("u + u^-1") in ring.generators
    assert su2.parse("z*u^-1") in ring.generators
    assert ring.contains(su2.parse("z*u^-1"))

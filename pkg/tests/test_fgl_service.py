"""
Tests for formal group laws, loop Euler classes and the sigma orientation.
"""

import random

import pytest

from loopk.core.laurent import LaurentPoly
from loopk.core.parsing import parse_poly
from loopk.core.qseries import QLaurentSeries
from loopk.errors import FGLAxiomError, FGLTruncationError, InputError, NonUnitError, QWindowError
from loopk.services.fgl_service import (
    FormalGroupLaw,
    LineVariable,
    LoopNormalModel,
    SymmetricLoopRep,
    create_fgl_service,
)


L_VARS = ("L",)


@pytest.fixture(scope="module")
def fgl():
    return create_fgl_service()


@pytest.fixture(scope="module")
def line():
    return LineVariable()


def rotation_class() -> QLaurentSeries:
    """1 - q, exact"""
    return QLaurentSeries(L_VARS, {0: 1, 1: -1}, None)


def series(coeffs, order=None, variables=L_VARS) -> QLaurentSeries:
    return QLaurentSeries(variables, coeffs, order)


# ============================================================================
# LAWS
# ============================================================================

def test_law_aliases(fgl):
    assert fgl.law("add").kind == "additive"
    assert fgl.law("mult").kind == "multiplicative"
    assert fgl.law("x + y + 3*x*y").kind == "custom"


@pytest.mark.parametrize("text", [
    "x + y + x^2*y",
    "x + y + x^2*y + x*y^2",
    "2*x + y",
    "x + y + 1",
    "x + y + x^2",
])
def test_invalid_laws(fgl, text):
    with pytest.raises(FGLAxiomError):
        fgl.law(text)


def test_multiplicative_sum_of_euler_and_rotation(fgl):
    law = fgl.law("mult")
    e = QLaurentSeries.constant(L_VARS, 1 - LaurentPoly.variable(L_VARS, "L"))
    q_class = fgl.fgl_k_series(law, rotation_class(), 1)
    assert fgl.fgl_sum(law, e, q_class) == series({0: 1, 1: parse_poly("-L", L_VARS)})


def test_additive_sum_and_k_series(fgl):
    law = fgl.law("add")
    variables = ("x", "y")
    x, y = (LaurentPoly.variable(variables, v) for v in variables)
    assert fgl.fgl_sum(law, x, y) == x + y
    assert fgl.fgl_k_series(law, x, 5) == x * 5
    assert fgl.fgl_k_series(law, x, -2) == x * -2


@pytest.mark.parametrize("k", range(-10, 11))
def test_todd_identity(fgl, k):
    law = fgl.law("mult")
    expected = series({0: 1, k: -1}) if k else QLaurentSeries.zero(L_VARS)
    assert fgl.fgl_k_series(law, rotation_class(), k) == expected


def test_k_series_on_laurent_polynomials(fgl):
    law = fgl.law("mult")
    variables = ("q",)
    one_minus_q = parse_poly("1 - q", variables)
    assert fgl.fgl_k_series(law, one_minus_q, 3) == parse_poly("1 - q^3", variables)
    assert fgl.fgl_k_series(law, one_minus_q, -3) == parse_poly("1 - q^-3", variables)


def test_multiplicative_inverse_needs_a_unit(fgl):
    with pytest.raises(NonUnitError):
        fgl.fgl_inverse(fgl.law("mult"), parse_poly("3 - q", ("q",)))


def test_custom_law_sum_and_inverse(fgl):
    law = fgl.law("x + y + x*y", degree=6)
    q = series({1: 1})
    total = fgl.fgl_sum(law, q, series({2: 1}))
    assert total == series({1: 1, 2: 1, 3: 1}, order=6)
    inverse = fgl.fgl_inverse(law, q)
    assert inverse == series({1: -1, 2: 1, 3: -1, 4: 1, 5: -1, 6: 1}, order=6)
    assert fgl.fgl_sum(law, q, inverse).is_zero


def test_custom_law_truncation_errors(fgl):
    law = fgl.law("x + y + x*y", degree=4)
    with pytest.raises(FGLTruncationError):
        fgl.fgl_sum(law, parse_poly("1 - q", ("q",)), parse_poly("q", ("q",)))
    with pytest.raises(FGLTruncationError):
        fgl.fgl_sum(law, series({0: 1, 1: 1}), series({1: 1}))
    with pytest.raises(FGLTruncationError):
        fgl.fgl_sum(law, series({1: 1}, order=9), series({1: 1}, order=9))


def test_custom_law_associativity_is_checked():
    law = FormalGroupLaw.custom({(1, 0): 1, (0, 1): 1, (1, 1): 2}, degree=5)
    assert law.to_dict()["law"] == "2*x*y + x + y"


AXIOM_ORDER = 5


def random_series(rng, order: int = AXIOM_ORDER) -> QLaurentSeries:
    """Truncated series without constant term, coefficients Laurent polynomials in L"""
    coeffs = {}
    for d in range(1, order + 1):
        terms = {(rng.randint(-2, 2),): rng.randint(-3, 3) for _ in range(2)}
        coeffs[d] = LaurentPoly(L_VARS, terms)
    return QLaurentSeries(L_VARS, coeffs, order)


@pytest.mark.parametrize("name", ["add", "mult", "x + y + x*y"])
def test_law_axioms_on_random_series(fgl, name):
    law = fgl.law(name, degree=AXIOM_ORDER)
    zero = QLaurentSeries.zero(L_VARS, AXIOM_ORDER)
    rng = random.Random(31)
    for _ in range(10):
        a, b, c = random_series(rng), random_series(rng), random_series(rng)
        assert fgl.fgl_sum(law, a, zero).agrees_with(a, through=AXIOM_ORDER)
        assert fgl.fgl_sum(law, a, b).agrees_with(fgl.fgl_sum(law, b, a), through=AXIOM_ORDER)
        left = fgl.fgl_sum(law, fgl.fgl_sum(law, a, b), c)
        right = fgl.fgl_sum(law, a, fgl.fgl_sum(law, b, c))
        assert left.agrees_with(right, through=AXIOM_ORDER)
        inverse = fgl.fgl_inverse(law, a)
        assert fgl.fgl_sum(law, a, inverse).agrees_with(zero, through=AXIOM_ORDER)


# ============================================================================
# EULER PRODUCTS
# ============================================================================

def test_one_root_first_mode(fgl):
    product = fgl.euler_normal_product(LoopNormalModel(("L",), 1), "mult")
    l = LaurentPoly.variable(L_VARS, "L")
    assert product == series({-1: -l, 0: 1 + l * l, 1: -l})


def test_empty_root_list(fgl):
    assert fgl.euler_normal_product(LoopNormalModel((), 2), "mult") == QLaurentSeries.one(())


def test_additive_product(fgl):
    product = fgl.euler_normal_product(LoopNormalModel(("x",), 1), "add")
    assert product.coefficient(0) == parse_poly("x^2 - t^2", ("x", "t"))


def test_q_order_must_hold_the_product(fgl):
    with pytest.raises(QWindowError):
        fgl.euler_normal_product(LoopNormalModel(("L",), 2, q_order=2), "mult")


def test_custom_law_has_no_loop_euler_class(fgl):
    with pytest.raises(FGLTruncationError):
        fgl.euler_normal_product(LoopNormalModel(("L",), 1), "x + y + x*y")


@pytest.mark.parametrize("roots", [("L",), ("L1", "L2")])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_raw_product_is_leading_unit_times_renormalized(fgl, roots, m):
    model = LoopNormalModel(roots, m)
    raw = fgl.euler_normal_product(model, "mult")
    assert raw == fgl.leading_unit(model) * fgl.renormalized_euler_product(model)
    assert raw.lowest_degree == -model.extent


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_renormalized_products_stabilize(fgl, m):
    current = fgl.renormalized_euler_product(LoopNormalModel(("L1", "L2"), m))
    following = fgl.renormalized_euler_product(LoopNormalModel(("L1", "L2"), m + 1))
    assert current.agrees_with(following, through=m)


def test_invalid_models():
    with pytest.raises(InputError):
        LoopNormalModel(("L",), 0)
    with pytest.raises(InputError):
        LoopNormalModel(("L", "L"), 1)
    with pytest.raises(InputError):
        LoopNormalModel(("q",), 1)


# ============================================================================
# SIGMA ORIENTATION
# ============================================================================

def test_epsilon_is_a_unit_with_trivial_constant_term(fgl, line):
    eps = fgl.epsilon_unit(line, 8)
    assert eps.is_unit
    assert eps.coefficient(0) == 1
    assert eps.coefficient(1) == parse_poly("2 - s^2 - s^-2", ("s",))
    assert all(line.is_integral(c) for _, c in eps.items())


def test_epsilon_at_trivial_bundle(fgl, line):
    eps = fgl.epsilon_unit(line, 8)
    assert eps.map_coefficients(lambda c: c.substitute("s", 1)) == QLaurentSeries.one(("s",), 8)


def test_epsilon_in_l(fgl, line):
    eps = line.series_in_l(fgl.epsilon_unit(line, 3))
    assert eps.variables == L_VARS
    assert eps.coefficient(1) == parse_poly("2 - L - L^-1", L_VARS)


def test_sigma_constant_term(fgl, line):
    sigma = fgl.sigma_class(line, 5)
    assert sigma.coefficient(0) == parse_poly("s - s^-1", ("s",))


def test_sigma_equals_renormalized_abs_product(fgl, line):
    assert fgl.abs_renormalized_sigma(line, 20) == fgl.sigma_class(line, 20)


def test_inverting_the_line_negates_sigma(fgl, line):
    sigma = fgl.sigma_class(line, 10)
    assert sigma.map_coefficients(lambda c: c.invert_variable("s")) == -sigma


def test_epsilon_order_must_be_positive(fgl, line):
    with pytest.raises(InputError):
        fgl.epsilon_unit(line, 0)


# ============================================================================
# SYMMETRIC LOOP REPRESENTATIONS
# ============================================================================

def test_spin_pairing(fgl):
    certificate = fgl.spin_pairable(["u", "u^-1"], 1)
    assert certificate.pairs == (("u*q", "u*q^-1"), ("u^-1*q", "u^-1*q^-1"))
    assert certificate.q_exponent == 0
    assert certificate.determinant == "1"


def test_spin_pairing_of_any_multiset(fgl):
    certificate = fgl.spin_pairable(["u^2", "u^2", "u^-1"], 3)
    assert len(certificate.pairs) == 3
    assert certificate.square_root == "u^3"
    assert certificate.determinant == "u^6"


def test_spin_pairing_needs_nonzero_k(fgl):
    with pytest.raises(InputError):
        fgl.spin_pairable(["u"], 0)


def test_spin_determinant_is_the_product_of_the_pairing(fgl):
    certificate = fgl.spin_pairable(["u^2", "u^-3", "u"], 2)
    variables = ("u", "q")
    product = LaurentPoly.one(variables)
    for up, down in certificate.pairs:
        product = product * parse_poly(up, variables) * parse_poly(down, variables)
    assert parse_poly(certificate.determinant, variables) == product
    assert certificate.q_exponent == product.leading_term()[0][-1] == 0
    root = parse_poly(certificate.square_root, variables)
    assert root * root == product


def test_loop_truncate(fgl):
    rep = SymmetricLoopRep(invariant=("1", "u"), default_mode=("u",))
    assert len(fgl.loop_truncate(rep, 0)) == 2
    assert len(fgl.loop_truncate(rep, 3)) == 2 + 6
    assert sorted(k for _, k in fgl.loop_truncate(rep, 1)) == [-1, 0, 0, 1]


def test_loop_truncate_uses_explicit_modes(fgl):
    rep = SymmetricLoopRep(modes={2: ("u", "u^-1")}, default_mode=("1",))
    assert fgl.loop_truncate(rep, 2) == [("1", 1), ("1", -1), ("u", 2), ("u", -2), ("u^-1", 2), ("u^-1", -2)]
    with pytest.raises(InputError):
        fgl.loop_truncate(rep, -1)

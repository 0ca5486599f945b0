"""
FGL Service - Formal Group Laws, Euler Classes and the Sigma Orientation

Equivariant Euler classes of the loop normal bundle and the renormalized
Thom class:
- FormalGroupLaw: additive, multiplicative (e(L) = 1 - L) or a validated custom law
- fgl_sum / fgl_k_series / fgl_inverse: formal sum, k-series and formal inverse
- euler_normal_product: prod over 0 < |k| <= m and roots of e(L_i) +_F [k](q)
- epsilon_unit / sigma_class: the unit eps_T(L) and sigma = (s - s^-1) eps_T(L)
- abs_renormalized_sigma: sigma from the renormalized ABS product
- spin_pairable / loop_truncate: symmetric loop representation bookkeeping

Half-integer powers of L are integer powers of s with s^2 = L.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from loopk.core.coefficients import normalize, to_coefficient
from loopk.core.laurent import LaurentPoly
from loopk.core.parsing import parse_poly, render_poly
from loopk.core.qseries import QLaurentSeries, qs_invert
from loopk.errors import (
    ComputationError,
    FGLAxiomError,
    FGLTruncationError,
    InputError,
    NonUnitError,
    QWindowError,
)


logger = logging.getLogger(__name__)

Element = Union[LaurentPoly, QLaurentSeries]

LAW_ALIASES = {
    "add": "additive",
    "additive": "additive",
    "mult": "multiplicative",
    "multiplicative": "multiplicative",
}


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class FormalGroupLaw:
    """F(x, y) = sum c_ij x^i y^j truncated at total degree `degree`"""
    kind: str
    degree: int
    coefficients: Mapping[Tuple[int, int], Fraction] = field(hash=False)

    @classmethod
    def additive(cls, degree: int = 8) -> "FormalGroupLaw":
        return cls("additive", degree, {(1, 0): Fraction(1), (0, 1): Fraction(1)})

    @classmethod
    def multiplicative(cls, degree: int = 8) -> "FormalGroupLaw":
        """x + y - xy, the law of the class e(L) = 1 - L"""
        return cls("multiplicative", degree, {(1, 0): Fraction(1), (0, 1): Fraction(1), (1, 1): Fraction(-1)})

    @classmethod
    def custom(cls, coefficients: Mapping[Tuple[int, int], object], degree: int) -> "FormalGroupLaw":
        """
        Build and validate a truncated law

        Raises:
            FGLAxiomError: unit, commutativity or associativity fails through `degree`
        """
        if degree < 1:
            raise InputError(f"truncation degree must be >= 1, got {degree}")
        clean: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), c in coefficients.items():
            if i < 0 or j < 0:
                raise FGLAxiomError(f"negative exponent in coefficient ({i}, {j})")
            if i + j > degree:
                continue
            value = Fraction(to_coefficient(c))
            if value:
                clean[(i, j)] = value
        law = cls("custom", degree, clean)
        law.validate()
        return law

    @classmethod
    def parse(cls, text: str, degree: int = 8) -> "FormalGroupLaw":
        """Law from an expression in x and y, e.g. "x + y + 2*x*y" """
        poly = parse_poly(text, ("x", "y"))
        if any(e < 0 for exps in poly.terms for e in exps):
            raise FGLAxiomError(f"a formal group law is a power series, got {text!r}")
        return cls.custom({exps: c for exps, c in poly.terms.items()}, degree)

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.coefficients.get((i, j), Fraction(0))

    def as_poly(self) -> LaurentPoly:
        return LaurentPoly(("x", "y"), {key: normalize(c) for key, c in self.coefficients.items()})

    def validate(self) -> None:
        """Unit, commutativity and associativity through the truncation degree"""
        if self.coefficient(0, 0):
            raise FGLAxiomError("F(0, 0) must vanish")
        if self.coefficient(1, 0) != 1 or self.coefficient(0, 1) != 1:
            raise FGLAxiomError("linear term must be x + y")
        for (i, j), c in self.coefficients.items():
            if (i == 0 or j == 0) and i + j > 1:
                raise FGLAxiomError(f"F(x, 0) = x fails: coefficient of x^{i} y^{j} is {c}")
            if self.coefficient(j, i) != c:
                raise FGLAxiomError(f"F is not symmetric at x^{i} y^{j}")
        variables = ("x", "y", "w")
        x, y, w = (LaurentPoly.variable(variables, name) for name in variables)
        left = _compose_truncated(self, _compose_truncated(self, x, y), w)
        right = _compose_truncated(self, x, _compose_truncated(self, y, w))
        if left != right:
            difference = left - right
            lowest = min(sum(exps) for exps in difference.terms)
            raise FGLAxiomError(f"associativity fails in total degree {lowest}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "degree": self.degree, "law": render_poly(self.as_poly())}


@dataclass(frozen=True)
class LineVariable:
    """A line bundle class L, carried through its square root s (L = s^2)"""
    name: str = "L"
    root: str = "s"

    @property
    def variables(self) -> Tuple[str, ...]:
        return (self.root,)

    def power(self, k: int) -> LaurentPoly:
        """L^k as s^(2k)"""
        return LaurentPoly.variable(self.variables, self.root, 2 * k)

    def is_integral(self, poly: LaurentPoly) -> bool:
        """True iff only integer powers of L occur (even powers of s)"""
        return all(exps[0] % 2 == 0 for exps in poly.terms)

    def in_l(self, poly: LaurentPoly) -> LaurentPoly:
        if not self.is_integral(poly):
            raise InputError(f"{poly} involves half-integer powers of {self.name}")
        return LaurentPoly((self.name,), {(exps[0] // 2,): c for exps, c in poly.terms.items()})

    def series_in_l(self, series: QLaurentSeries) -> QLaurentSeries:
        return series.map_coefficients(self.in_l) if not series.is_zero else QLaurentSeries.zero((self.name,), series.order)


@dataclass(frozen=True)
class LoopNormalModel:
    """Chern roots L_i of TM and a Fourier cutoff m; q_order None keeps the product exact"""
    roots: Tuple[str, ...]
    fourier: int
    q_order: Optional[int] = None

    def __post_init__(self):
        if self.fourier < 1:
            raise InputError(f"Fourier cutoff must be >= 1, got {self.fourier}")
        if len(set(self.roots)) != len(self.roots):
            raise InputError(f"root names must be distinct: {self.roots}")
        if "q" in self.roots or "t" in self.roots:
            raise InputError("'q' and 't' are reserved for the rotation")

    @property
    def extent(self) -> int:
        """Largest |q-degree| of the truncated product: #roots * m(m+1)/2"""
        return len(self.roots) * self.fourier * (self.fourier + 1) // 2


@dataclass(frozen=True)
class SymmetricLoopRep:
    """
    V = V^T + sum_{k != 0} V_k q^k with V_-k = V_k

    `modes` lists V_k for the k given explicitly; every other k >= 1 uses
    `default_mode`.
    """
    invariant: Tuple[str, ...] = ()
    modes: Mapping[int, Tuple[str, ...]] = field(default_factory=dict, hash=False)
    default_mode: Tuple[str, ...] = ()

    def mode(self, k: int) -> Tuple[str, ...]:
        if k == 0:
            return self.invariant
        return tuple(self.modes.get(abs(k), self.default_mode))


@dataclass(frozen=True)
class SpinCertificate:
    """Pairing of the weights of W (q^k + q^-k) exhibiting its determinant as a square"""
    k: int
    pairs: Tuple[Tuple[str, str], ...]
    q_exponent: int
    determinant: str
    square_root: str

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "pairs": [list(p) for p in self.pairs],
            "q_exponent": self.q_exponent,
            "determinant": self.determinant,
            "square_root": self.square_root,
        }


# ============================================================================
# HELPERS
# ============================================================================

def _truncate_total(poly: LaurentPoly, degree: int) -> LaurentPoly:
    return poly.filter_terms(lambda exps: sum(exps) <= degree)


def _compose_truncated(law: FormalGroupLaw, a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """F(a, b) for polynomials without constant term, cut at total degree law.degree"""
    top = law.degree
    powers_a = [LaurentPoly.one(a.variables)]
    powers_b = [LaurentPoly.one(b.variables)]
    for _ in range(top):
        powers_a.append(_truncate_total(powers_a[-1] * a, top))
        powers_b.append(_truncate_total(powers_b[-1] * b, top))
    result = LaurentPoly.zero(a.variables)
    for (i, j), c in law.coefficients.items():
        result = result + _truncate_total(powers_a[i] * powers_b[j], top).scale(c)
    return result


def _series_powers(a: QLaurentSeries, top: int) -> List[QLaurentSeries]:
    powers = [QLaurentSeries.one(a.variables, a.order)]
    for _ in range(top):
        powers.append(powers[-1] * a)
    return powers


def _q_rotation(variables: Sequence[str], k: int) -> QLaurentSeries:
    """Exact q^k"""
    return QLaurentSeries.q_power(variables, k)


# ============================================================================
# FGL SERVICE
# ============================================================================

class FGLService:
    """
    Formal group law arithmetic and the sigma orientation

    Multiplicative classes are represented by their K-theory values
    (e(L) = 1 - L, [k](1 - q) = 1 - q^k); additive ones by Chern roots.
    """

    def __init__(self, default_degree: int = 8):
        self.default_degree = default_degree

    def law(self, law: Union[str, FormalGroupLaw], degree: Optional[int] = None) -> FormalGroupLaw:
        """Resolve "add" / "mult" / an expression in x, y into a FormalGroupLaw"""
        if isinstance(law, FormalGroupLaw):
            return law
        degree = degree or self.default_degree
        kind = LAW_ALIASES.get(law.strip().lower())
        if kind == "additive":
            return FormalGroupLaw.additive(degree)
        if kind == "multiplicative":
            return FormalGroupLaw.multiplicative(degree)
        return FormalGroupLaw.parse(law, degree)

    # ========================================================================
    # FORMAL ARITHMETIC
    # ========================================================================

    def _check_custom_input(self, law: FormalGroupLaw, *elements: Element) -> Optional[int]:
        """Custom laws need series of positive valuation known through at most q^D"""
        orders = []
        for e in elements:
            if not isinstance(e, QLaurentSeries):
                raise FGLTruncationError("a custom law is evaluated on q-series only")
            if not e.is_zero and e.lowest_degree < 1:
                raise FGLTruncationError("a custom law needs arguments without constant term")
            orders.append(law.degree if e.order is None else e.order)
        order = min(orders)
        if order > law.degree:
            raise FGLTruncationError(
                f"arguments known through q^{order} exceed the law's truncation degree {law.degree}"
            )
        return order

    def fgl_sum(self, law: FormalGroupLaw, a: Element, b: Element) -> Element:
        """
        Formal sum F(a, b)

        Args:
            law: formal group law
            a, b: LaurentPoly or QLaurentSeries values in the law's coordinate

        Returns:
            F(a, b) in the same ring

        Raises:
            FGLTruncationError: custom law with inputs its truncation cannot resolve
        """
        if isinstance(a, QLaurentSeries) and isinstance(b, LaurentPoly):
            b = QLaurentSeries.constant(a.variables, b)
        elif isinstance(b, QLaurentSeries) and isinstance(a, LaurentPoly):
            a = QLaurentSeries.constant(b.variables, a)
        if law.kind == "additive":
            return a + b
        if law.kind == "multiplicative":
            return a + b - a * b
        order = self._check_custom_input(law, a, b)
        a, b = a.with_order(order), b.with_order(order)
        powers_a = _series_powers(a, law.degree)
        powers_b = _series_powers(b, law.degree)
        result = QLaurentSeries.zero(a.variables, order)
        for (i, j), c in law.coefficients.items():
            result = result + (powers_a[i] * powers_b[j]) * c
        return result.truncate(order)

    def fgl_inverse(self, law: FormalGroupLaw, a: Element) -> Element:
        """
        Formal inverse [-1](a): F(a, [-1](a)) = 0

        Raises:
            NonUnitError: multiplicative inverse of a polynomial a with a - 1 not a unit
        """
        if law.kind == "additive":
            return -a
        if law.kind == "multiplicative":
            shifted = a - 1
            if isinstance(a, LaurentPoly):
                if not shifted.is_unit:
                    raise NonUnitError(f"{shifted} is not a unit, so [-1]({a}) is not a Laurent polynomial")
                return a * shifted.inverse_monomial()
            return a * qs_invert(shifted)
        order = self._check_custom_input(law, a)
        a = a.with_order(order)
        iota = self._custom_inverse_coefficients(law)
        powers = _series_powers(a, law.degree)
        result = QLaurentSeries.zero(a.variables, order)
        for n, c in iota.items():
            result = result + powers[n] * c
        return result.truncate(order)

    @staticmethod
    def _custom_inverse_coefficients(law: FormalGroupLaw) -> Dict[int, Fraction]:
        """Coefficients of iota(x) with F(x, iota(x)) = 0 through x^D"""
        variables = ("x",)
        x = LaurentPoly.variable(variables, "x")
        iota = -x
        for _ in range(law.degree):
            residual = _compose_truncated(law, x, iota)
            if residual.is_zero:
                break
            iota = _truncate_total(iota - residual, law.degree)
        return {exps[0]: Fraction(c) for exps, c in iota.terms.items()}

    def fgl_k_series(self, law: FormalGroupLaw, e: Element, k: int) -> Element:
        """[k](e): k-fold formal sum, [0] = 0, [-k] = [-1]([k])"""
        if k == 0:
            return e * 0
        if k < 0:
            return self.fgl_inverse(law, self.fgl_k_series(law, e, -k))
        if law.kind == "additive":
            return e * k
        result = e
        for _ in range(k - 1):
            result = self.fgl_sum(law, result, e)
        return result

    # ========================================================================
    # EULER CLASS OF THE LOOP NORMAL BUNDLE
    # ========================================================================

    def euler_normal_product(self, model: LoopNormalModel, law: FormalGroupLaw) -> QLaurentSeries:
        """
        prod_{0 < |k| <= m} prod_i (e(L_i) +_F [k](q))

        Multiplicative: a finite Laurent series in q over the root variables,
        exact unless the model fixes a q-order, which must reach
        #roots * m(m+1)/2. Additive: a constant series over the roots and t,
        the product of (x_i + k t).

        Raises:
            QWindowError: the q-order cannot hold the product
            FGLTruncationError: custom laws (the classes have constant terms)
        """
        law = self.law(law)
        m = model.fourier
        if law.kind == "additive":
            variables = model.roots + ("t",)
            t = LaurentPoly.variable(variables, "t")
            result = LaurentPoly.one(variables)
            for name in model.roots:
                x = LaurentPoly.variable(variables, name)
                for k in range(1, m + 1):
                    result = result * self.fgl_sum(law, x, t * k) * self.fgl_sum(law, x, t * -k)
            return QLaurentSeries.constant(variables, result, model.q_order)
        if law.kind != "multiplicative":
            raise FGLTruncationError("the loop Euler class is defined for the additive and multiplicative laws")
        if model.q_order is not None and model.q_order < model.extent:
            raise QWindowError(
                f"q-order {model.q_order} cannot hold the product through q^{model.extent}"
            )
        variables = model.roots
        rotation = 1 - _q_rotation(variables, 1)
        result = QLaurentSeries.one(variables)
        for name in model.roots:
            e = QLaurentSeries.constant(variables, 1 - LaurentPoly.variable(variables, name))
            for k in range(1, m + 1):
                for signed in (k, -k):
                    result = result * self.fgl_sum(law, e, self.fgl_k_series(law, rotation, signed))
        logger.debug(f"✅ Euler product over {len(model.roots)} roots, m={m}: {len(result)} q-degrees")
        return result.with_order(model.q_order)

    def leading_unit(self, model: LoopNormalModel) -> QLaurentSeries:
        """prod_{i, 0 < k <= m} (-L_i q^-k), the factor separating raw and renormalized products"""
        variables = model.roots
        m = model.fourier
        exps = tuple(m for _ in variables)
        coeff = (-1) ** (len(variables) * m)
        return QLaurentSeries.q_power(variables, -model.extent, LaurentPoly.monomial(variables, exps, coeff))

    def renormalized_euler_product(self, model: LoopNormalModel) -> QLaurentSeries:
        """
        prod_{0 < k <= m} prod_i (1 - q^k L_i)(1 - q^k L_i^-1)

        The raw product divided by its leading unit; products for m and
        m + 1 agree through q^m.
        """
        variables = model.roots
        result = QLaurentSeries.one(variables)
        for name in variables:
            l = LaurentPoly.variable(variables, name)
            for k in range(1, model.fourier + 1):
                q_k = _q_rotation(variables, k)
                result = result * (1 - q_k * l) * (1 - q_k * l.inverse_monomial())
        return result.with_order(model.q_order)

    # ========================================================================
    # SIGMA ORIENTATION
    # ========================================================================

    def _epsilon(self, line: LineVariable, order: int) -> QLaurentSeries:
        variables = line.variables
        l, l_inv = line.power(1), line.power(-1)
        numerator = QLaurentSeries.one(variables, order)
        denominator = QLaurentSeries.one(variables, order)
        for k in range(1, order + 1):
            q_k = _q_rotation(variables, k)
            numerator = numerator * (1 - q_k * l) * (1 - q_k * l_inv)
            denominator = denominator * (1 - q_k) * (1 - q_k)
        return numerator * qs_invert(denominator)

    def epsilon_unit(self, line: LineVariable, order: int) -> QLaurentSeries:
        """
        eps_T(L) = prod_{k >= 1} (1 - q^k L)(1 - q^k L^-1) / (1 - q^k)^2 through q^order

        Coefficients are Laurent polynomials in s (L = s^2); only even powers occur.
        """
        if order < 1:
            raise InputError(f"q-order must be >= 1, got {order}")
        return self._epsilon(line, order)

    def sigma_class(self, line: LineVariable, order: int) -> QLaurentSeries:
        """sigma(L, q) = (s - s^-1) eps_T(L) through q^order"""
        if order < 0:
            raise InputError(f"q-order must be >= 0, got {order}")
        s = LaurentPoly.variable(line.variables, line.root)
        return self._epsilon(line, order) * (s - s.inverse_monomial())

    def abs_renormalized_sigma(self, line: LineVariable, order: int) -> QLaurentSeries:
        """
        sigma from the ABS product, renormalized factor by factor:

            (s - s^-1) prod_{k >= 1} (L + L^-1 - q^k - q^-k) / (2 - q^k - q^-k)
        """
        if order < 0:
            raise InputError(f"q-order must be >= 0, got {order}")
        variables = line.variables
        s = LaurentPoly.variable(variables, line.root)
        result = QLaurentSeries.constant(variables, s - s.inverse_monomial(), order)
        trace = line.power(1) + line.power(-1)
        for k in range(1, order + 1):
            q_k, q_mk = _q_rotation(variables, k), _q_rotation(variables, -k)
            numerator = trace - q_k - q_mk
            denominator = 2 - q_k - q_mk
            result = result * (numerator * qs_invert(denominator, order=order + k))
        return result

    # ========================================================================
    # SYMMETRIC LOOP REPRESENTATIONS
    # ========================================================================

    def spin_pairable(self, weights: Sequence[str], k: int, variables: Sequence[str] = ("u",)) -> SpinCertificate:
        """
        Pair the weights of W (q^k + q^-k) as (w q^k, w q^-k)

        The determinant is the product of every paired weight. Its q-exponent
        is read off that product and the square root prod_w w is checked
        against it.

        Raises:
            InputError: k = 0 or a weight that is not a monomial
            ComputationError: the determinant is not the square of prod_w w
        """
        if k == 0:
            raise InputError("k must be nonzero: W (q^0 + q^0) has no canonical pairing")
        variables = tuple(variables)
        full = variables + ("q",)
        pairs = []
        determinant = LaurentPoly.one(full)
        root = LaurentPoly.one(full)
        for text in weights:
            weight = parse_poly(text, variables)
            if not weight.is_monomial or not weight.is_unit:
                raise InputError(f"weight {text!r} is not a monomial")
            w = weight.with_variables(full)
            up = w * LaurentPoly.variable(full, "q", k)
            down = w * LaurentPoly.variable(full, "q", -k)
            pairs.append((render_poly(up, compact=True), render_poly(down, compact=True)))
            determinant = determinant * up * down
            root = root * w
        if determinant != root * root:
            raise ComputationError(f"determinant {determinant} is not the square of {root}")
        q_exponent = determinant.leading_term()[0][-1]
        return SpinCertificate(
            k=k,
            pairs=tuple(pairs),
            q_exponent=q_exponent,
            determinant=render_poly(determinant, compact=True),
            square_root=render_poly(root, compact=True),
        )

    @staticmethod
    def loop_truncate(rep: SymmetricLoopRep, m: int) -> List[Tuple[str, int]]:
        """V(m) = V^T + sum_{0 < k <= m} V_k (q^k + q^-k) as (weight, q-degree) pairs"""
        if m < 0:
            raise InputError(f"m must be >= 0, got {m}")
        weights = [(w, 0) for w in rep.invariant]
        for k in range(1, m + 1):
            for w in rep.mode(k):
                weights.append((w, k))
                weights.append((w, -k))
        return weights


# ============================================================================
# CONVENIENCE FUNCTIONS
# ============================================================================

def create_fgl_service(default_degree: int = 8) -> FGLService:
    """
    Create FGLService

    Args:
        default_degree: truncation degree for laws resolved from names
    """
    return FGLService(default_degree=default_degree)

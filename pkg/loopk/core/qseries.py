"""
Truncated Laurent series in q with LaurentPoly coefficients

A QLaurentSeries is known through q^order. order=None marks an exact
series (a finite Laurent polynomial in q, known completely); exact series
never lose precision and are truncated only on request.

Precision rules:
- sum: min of the two orders
- product: min(order_a + val_b, order_b + val_a)
- inverse of a series with valuation d known through N: N - 2d
"""

import math
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from loopk.core.coefficients import Coefficient, normalize
from loopk.core.laurent import LaurentPoly
from loopk.errors import InputError, NonUnitError, QWindowError, VariableMismatchError


CoefficientLike = Union[LaurentPoly, int, Fraction]


class QLaurentSeries:
    """Element of R((q)) truncated at a declared q-order, R a Laurent polynomial ring"""

    __slots__ = ("_variables", "_order", "_coeffs")

    def __init__(
        self,
        variables: Sequence[str],
        coefficients: Mapping[int, CoefficientLike],
        order: Optional[int],
    ):
        self._variables = tuple(variables)
        self._order = order
        clean: Dict[int, LaurentPoly] = {}
        for degree, coeff in coefficients.items():
            degree = int(degree)
            if order is not None and degree > order:
                continue
            poly = self._as_poly(coeff)
            if not poly.is_zero:
                clean[degree] = poly
        self._coeffs = clean

    def _as_poly(self, coeff: CoefficientLike) -> LaurentPoly:
        if isinstance(coeff, LaurentPoly):
            if coeff.variables != self._variables:
                raise VariableMismatchError(
                    f"coefficient variables {coeff.variables} differ from {self._variables}"
                )
            return coeff
        return LaurentPoly.constant(self._variables, coeff)

    @classmethod
    def _trusted(cls, variables: Tuple[str, ...], coeffs: Dict[int, LaurentPoly], order: Optional[int]):
        series = object.__new__(cls)
        series._variables = variables
        series._order = order
        series._coeffs = coeffs
        return series

    # ========================================================================
    # CONSTRUCTORS
    # ========================================================================

    @classmethod
    def zero(cls, variables: Sequence[str], order: Optional[int] = None) -> "QLaurentSeries":
        return cls._trusted(tuple(variables), {}, order)

    @classmethod
    def constant(cls, variables: Sequence[str], value: CoefficientLike, order: Optional[int] = None) -> "QLaurentSeries":
        return cls(variables, {0: value}, order)

    @classmethod
    def one(cls, variables: Sequence[str], order: Optional[int] = None) -> "QLaurentSeries":
        return cls.constant(variables, 1, order)

    @classmethod
    def q_power(cls, variables: Sequence[str], k: int, coeff: CoefficientLike = 1, order: Optional[int] = None) -> "QLaurentSeries":
        return cls(variables, {k: coeff}, order)

    @classmethod
    def from_q_polynomial(cls, poly: LaurentPoly, q: str = "q", order: Optional[int] = None) -> "QLaurentSeries":
        """Split a LaurentPoly containing q into a series over the remaining variables"""
        i = poly.index(q)
        rest = poly.variables[:i] + poly.variables[i + 1:]
        buckets: Dict[int, Dict[Tuple[int, ...], Coefficient]] = {}
        for exps, c in poly.terms.items():
            buckets.setdefault(exps[i], {})[exps[:i] + exps[i + 1:]] = c
        return cls(rest, {d: LaurentPoly(rest, terms) for d, terms in buckets.items()}, order)

    # ========================================================================
    # ACCESSORS
    # ========================================================================

    @property
    def variables(self) -> Tuple[str, ...]:
        return self._variables

    @property
    def order(self) -> Optional[int]:
        return self._order

    @property
    def is_exact(self) -> bool:
        return self._order is None

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def lowest_degree(self) -> Optional[int]:
        return min(self._coeffs) if self._coeffs else None

    @property
    def highest_degree(self) -> Optional[int]:
        return max(self._coeffs) if self._coeffs else None

    def _valuation(self) -> float:
        if self._coeffs:
            return min(self._coeffs)
        return math.inf if self._order is None else self._order + 1

    @property
    def is_unit(self) -> bool:
        return bool(self._coeffs) and self._coeffs[min(self._coeffs)].is_unit

    def coefficient(self, degree: int) -> LaurentPoly:
        if self._order is not None and degree > self._order:
            raise QWindowError(f"q^{degree} lies beyond the truncation order {self._order}")
        return self._coeffs.get(degree, LaurentPoly.zero(self._variables))

    def coefficients(self) -> List[LaurentPoly]:
        """Coefficient list from the lowest degree through the order"""
        if not self._coeffs:
            return []
        top = self._order if self._order is not None else max(self._coeffs)
        return [self.coefficient(d) for d in range(min(self._coeffs), top + 1)]

    def items(self) -> Iterator[Tuple[int, LaurentPoly]]:
        for degree in sorted(self._coeffs):
            yield degree, self._coeffs[degree]

    def __len__(self) -> int:
        return len(self._coeffs)

    # ========================================================================
    # ARITHMETIC
    # ========================================================================

    def _coerce(self, other) -> "QLaurentSeries":
        if isinstance(other, QLaurentSeries):
            if other._variables != self._variables:
                raise VariableMismatchError(
                    f"coefficient variables differ: {self._variables} vs {other._variables}"
                )
            return other
        if isinstance(other, LaurentPoly) or (isinstance(other, (int, Fraction)) and not isinstance(other, bool)):
            return QLaurentSeries.constant(self._variables, other if isinstance(other, LaurentPoly) else normalize(other))
        return NotImplemented

    def __add__(self, other) -> "QLaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = _min_order(self._order, other._order)
        coeffs = dict(self._coeffs)
        for degree, poly in other._coeffs.items():
            total = coeffs.get(degree)
            total = poly if total is None else total + poly
            if total.is_zero:
                coeffs.pop(degree, None)
            else:
                coeffs[degree] = total
        if order is not None:
            coeffs = {d: p for d, p in coeffs.items() if d <= order}
        return QLaurentSeries._trusted(self._variables, coeffs, order)

    __radd__ = __add__

    def __neg__(self) -> "QLaurentSeries":
        return QLaurentSeries._trusted(self._variables, {d: -p for d, p in self._coeffs.items()}, self._order)

    def __sub__(self, other) -> "QLaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "QLaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "QLaurentSeries":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                return QLaurentSeries._trusted(self._variables, {}, self._order)
            return QLaurentSeries._trusted(
                self._variables, {d: p.scale(other) for d, p in self._coeffs.items()}, self._order
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return qs_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QLaurentSeries":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return qs_invert(self) ** (-k)
        result = QLaurentSeries.one(self._variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        if self._order is not None and result.is_exact:
            result = result.with_order(self._order)
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, QLaurentSeries):
            return NotImplemented
        return (
            self._variables == other._variables
            and self._order == other._order
            and self._coeffs == other._coeffs
        )

    def __hash__(self) -> int:
        return hash((self._variables, self._order, frozenset(self._coeffs.items())))

    # ========================================================================
    # TRANSFORMS
    # ========================================================================

    def truncate(self, order: int) -> "QLaurentSeries":
        """Forget everything above q^order (the order can only go down)"""
        if self._order is not None and order > self._order:
            raise QWindowError(f"series known only through q^{self._order}, asked for q^{order}")
        return QLaurentSeries._trusted(
            self._variables, {d: p for d, p in self._coeffs.items() if d <= order}, order
        )

    def with_order(self, order: Optional[int]) -> "QLaurentSeries":
        if order is None:
            return self
        return self.truncate(order)

    def shift(self, k: int) -> "QLaurentSeries":
        """Multiply by q^k"""
        order = None if self._order is None else self._order + k
        return QLaurentSeries._trusted(
            self._variables, {d + k: p for d, p in self._coeffs.items()}, order
        )

    def map_coefficients(self, fn) -> "QLaurentSeries":
        mapped = {d: fn(p) for d, p in self._coeffs.items()}
        variables = next(iter(mapped.values())).variables if mapped else self._variables
        return QLaurentSeries(variables, mapped, self._order)

    def agrees_with(self, other: "QLaurentSeries", through: int) -> bool:
        """Coefficientwise equality for every q-degree up to and including `through`"""
        degrees = {d for d in self._coeffs if d <= through} | {d for d in other._coeffs if d <= through}
        zero = LaurentPoly.zero(self._variables)
        return all(self._coeffs.get(d, zero) == other._coeffs.get(d, zero) for d in degrees)

    def to_q_polynomial(self, q: str = "q") -> LaurentPoly:
        """Finite part as one LaurentPoly with q appended to the variables"""
        variables = self._variables + (q,)
        terms = {}
        for degree, poly in self._coeffs.items():
            for exps, c in poly.terms.items():
                terms[exps + (degree,)] = c
        return LaurentPoly(variables, terms)

    def __repr__(self) -> str:
        return f"QLaurentSeries({self._variables}, order={self._order}, {dict(self.items())!r})"

    def __str__(self) -> str:
        from loopk.core.parsing import render_series
        return render_series(self)


def _min_order(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ============================================================================
# MODULE OPERATIONS
# ============================================================================

def qs_mul(a: QLaurentSeries, b: QLaurentSeries) -> QLaurentSeries:
    """
    Truncated Cauchy product, known through min(order_a + val_b, order_b + val_a)

    With positive valuations this exceeds min(order_a, order_b): every unknown
    term of one factor meets only terms of degree >= val of the other.
    """
    if a.variables != b.variables:
        raise VariableMismatchError(f"coefficient variables differ: {a.variables} vs {b.variables}")
    candidates = []
    if a.order is not None:
        candidates.append(a.order + b._valuation())
    if b.order is not None:
        candidates.append(b.order + a._valuation())
    bound = min(candidates) if candidates else math.inf
    order = None if bound == math.inf else int(bound)

    coeffs: Dict[int, LaurentPoly] = {}
    for da, pa in a.items():
        for db, pb in b.items():
            degree = da + db
            if order is not None and degree > order:
                break
            product = pa * pb
            total = coeffs.get(degree)
            coeffs[degree] = product if total is None else total + product
    return QLaurentSeries._trusted(
        a.variables, {d: p for d, p in coeffs.items() if not p.is_zero}, order
    )


def qs_invert(a: QLaurentSeries, order: Optional[int] = None) -> QLaurentSeries:
    """
    Multiplicative inverse of a unit series

    The lowest coefficient must be ±1 times a monomial. For an exact input the
    target order must be given; for a truncated input the result is known
    through order(a) - 2 * valuation(a) (capped by `order` when given).

    Raises:
        NonUnitError: zero series or non-unit lowest coefficient
        QWindowError: exact input without a target order
    """
    if a.is_zero:
        raise NonUnitError("the zero series is not invertible")
    d = a.lowest_degree
    lead = a.coefficient(d)
    if not lead.is_unit:
        raise NonUnitError(f"lowest coefficient {lead} is not ±1 times a monomial")

    if a.order is None and len(a) == 1:
        inverse = QLaurentSeries._trusted(a.variables, {-d: lead.inverse_monomial()}, None)
        return inverse if order is None else inverse.truncate(order)
    if a.order is None:
        if order is None:
            raise QWindowError("inverting an exact series needs a target q-order")
        target = order
    else:
        target = a.order - 2 * d if order is None else min(order, a.order - 2 * d)

    # r = a * q^-d * lead^-1 has constant term 1
    lead_inv = lead.inverse_monomial()
    span = target + d
    if span < 0:
        return QLaurentSeries.zero(a.variables, target)
    r = [a._coeffs.get(d + i, None) for i in range(span + 1)]
    r = [None if p is None else p * lead_inv for p in r]
    b: List[LaurentPoly] = [LaurentPoly.one(a.variables)]
    for n in range(1, span + 1):
        acc = LaurentPoly.zero(a.variables)
        for i in range(1, n + 1):
            if r[i] is not None and not b[n - i].is_zero:
                acc = acc + r[i] * b[n - i]
        b.append(-acc)
    coeffs = {n - d: p * lead_inv for n, p in enumerate(b) if not p.is_zero}
    return QLaurentSeries._trusted(a.variables, coeffs, target)

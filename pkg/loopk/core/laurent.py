"""
Exact multivariate Laurent polynomials

LaurentPoly is the carrier of every character and K-theory element:
- variables are an ordered tuple of names, exponent vectors match its arity
- the support map never stores a zero coefficient
- values are immutable; every operation returns a new polynomial
"""

from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from loopk.core.coefficients import Coefficient, exact_quotient, normalize
from loopk.errors import InputError, NonExactDivisionError, VariableMismatchError


Exponents = Tuple[int, ...]
Scalar = Union[int, Fraction]


class LaurentPoly:
    """Finite sum of coefficient * monomial over a fixed variable list"""

    __slots__ = ("_variables", "_terms", "_hash")

    def __init__(
        self,
        variables: Sequence[str],
        terms: Optional[Mapping[Sequence[int], Coefficient]] = None,
    ):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise InputError(f"duplicate variable names in {variables}")
        clean: Dict[Exponents, Coefficient] = {}
        for exps, coeff in (terms or {}).items():
            key = tuple(int(e) for e in exps)
            if len(key) != len(variables):
                raise InputError(f"exponent vector {key} does not match variables {variables}")
            value = normalize(coeff)
            if key in clean:
                value = normalize(clean[key] + value)
            if value != 0:
                clean[key] = value
            else:
                clean.pop(key, None)
        self._variables = variables
        self._terms = clean
        self._hash = None

    @classmethod
    def _trusted(cls, variables: Tuple[str, ...], terms: Dict[Exponents, Coefficient]) -> "LaurentPoly":
        poly = object.__new__(cls)
        poly._variables = variables
        poly._terms = terms
        poly._hash = None
        return poly

    # ========================================================================
    # CONSTRUCTORS
    # ========================================================================

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "LaurentPoly":
        return cls._trusted(tuple(variables), {})

    @classmethod
    def constant(cls, variables: Sequence[str], value: Coefficient) -> "LaurentPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def one(cls, variables: Sequence[str]) -> "LaurentPoly":
        return cls.constant(variables, 1)

    @classmethod
    def monomial(cls, variables: Sequence[str], exponents: Sequence[int], coeff: Coefficient = 1) -> "LaurentPoly":
        return cls(variables, {tuple(exponents): coeff})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str, power: int = 1) -> "LaurentPoly":
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatchError(f"unknown variable {name!r}; declared {variables}")
        exps = [0] * len(variables)
        exps[variables.index(name)] = power
        return cls._trusted(variables, {tuple(exps): 1})

    # ========================================================================
    # ACCESSORS
    # ========================================================================

    @property
    def variables(self) -> Tuple[str, ...]:
        return self._variables

    @property
    def terms(self) -> Mapping[Exponents, Coefficient]:
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and all(e == 0 for e in next(iter(self._terms))))

    @property
    def constant_value(self) -> Coefficient:
        return self._terms.get((0,) * len(self._variables), 0)

    @property
    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    @property
    def is_unit(self) -> bool:
        """±1 times a monomial: the units of the integral Laurent ring"""
        return self.is_monomial and abs(next(iter(self._terms.values()))) == 1

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, exponents: Sequence[int]) -> Coefficient:
        return self._terms.get(tuple(exponents), 0)

    def sorted_terms(self) -> List[Tuple[Exponents, Coefficient]]:
        """Terms in canonical order: exponent vectors lexicographically descending"""
        return sorted(self._terms.items(), key=lambda item: item[0], reverse=True)

    def leading_term(self) -> Tuple[Exponents, Coefficient]:
        if not self._terms:
            raise InputError("zero polynomial has no leading term")
        lead = max(self._terms)
        return lead, self._terms[lead]

    def index(self, name: str) -> int:
        if name not in self._variables:
            raise VariableMismatchError(f"unknown variable {name!r}; declared {self._variables}")
        return self._variables.index(name)

    def min_exponent(self, name: str) -> int:
        i = self.index(name)
        return min((e[i] for e in self._terms), default=0)

    def max_exponent(self, name: str) -> int:
        i = self.index(name)
        return max((e[i] for e in self._terms), default=0)

    # ========================================================================
    # ARITHMETIC
    # ========================================================================

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other._variables != self._variables:
                raise VariableMismatchError(
                    f"variable lists differ: {self._variables} vs {other._variables}"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentPoly.constant(self._variables, other)
        return NotImplemented

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for exps, c in other._terms.items():
            value = terms.get(exps, 0) + c
            if value == 0:
                terms.pop(exps, None)
            else:
                terms[exps] = normalize(value)
        return LaurentPoly._trusted(self._variables, terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._trusted(self._variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Exponents, Coefficient] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                terms[key] = terms.get(key, 0) + c1 * c2
        return LaurentPoly._trusted(
            self._variables, {e: normalize(c) for e, c in terms.items() if c != 0}
        )

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> "LaurentPoly":
        factor = normalize(factor)
        if factor == 0:
            return LaurentPoly.zero(self._variables)
        return LaurentPoly._trusted(
            self._variables, {e: normalize(c * factor) for e, c in self._terms.items()}
        )

    def __pow__(self, k: int) -> "LaurentPoly":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse_monomial() ** (-k)
        result = LaurentPoly.one(self._variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse_monomial(self) -> "LaurentPoly":
        """Inverse of a single-term polynomial (rational coefficient if not ±1)"""
        if not self.is_monomial:
            raise InputError(f"only monomials can be inverted in the Laurent ring, got {self}")
        (exps, c), = self._terms.items()
        return LaurentPoly._trusted(
            self._variables, {tuple(-e for e in exps): normalize(Fraction(1) / Fraction(c))}
        )

    def __truediv__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_monomial:
            return self * other.inverse_monomial()
        return lp_exact_divide(self, other)

    def exact_scalar_divide(self, k: int) -> "LaurentPoly":
        """Divide an integral polynomial by an integer that divides every coefficient"""
        terms = {}
        for exps, c in self._terms.items():
            q = exact_quotient(c, k, rational=not isinstance(c, int))
            if q is None:
                raise NonExactDivisionError(f"{k} does not divide coefficient {c}")
            terms[exps] = q
        return LaurentPoly._trusted(self._variables, terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._variables == other._variables and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == LaurentPoly.constant(self._variables, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._variables, frozenset(self._terms.items())))
        return self._hash

    # ========================================================================
    # TRANSFORMS
    # ========================================================================

    def map_exponents(self, fn: Callable[[Exponents], Sequence[int]]) -> "LaurentPoly":
        terms: Dict[Exponents, Coefficient] = {}
        for exps, c in self._terms.items():
            key = tuple(fn(exps))
            terms[key] = terms.get(key, 0) + c
        return LaurentPoly._trusted(
            self._variables, {e: normalize(c) for e, c in terms.items() if c != 0}
        )

    def adams(self, k: int) -> "LaurentPoly":
        """Adams operation psi^k: every exponent scaled by k"""
        return self.map_exponents(lambda exps: [k * e for e in exps])

    def invert_variable(self, name: str) -> "LaurentPoly":
        i = self.index(name)
        return self.map_exponents(lambda exps: exps[:i] + (-exps[i],) + exps[i + 1:])

    def substitute(self, name: str, value: Coefficient) -> "LaurentPoly":
        """Specialize one variable to an exact number (the variable stays declared)"""
        i = self.index(name)
        value = normalize(value)
        terms: Dict[Exponents, Coefficient] = {}
        for exps, c in self._terms.items():
            e = exps[i]
            if e < 0 and value == 0:
                raise ZeroDivisionError(f"cannot set {name}=0 in a term with negative exponent")
            factor = Fraction(value) ** e if e < 0 else value ** e
            key = exps[:i] + (0,) + exps[i + 1:]
            terms[key] = terms.get(key, 0) + c * factor
        return LaurentPoly(self._variables, terms)

    def evaluate(self, assignment: Mapping[str, Coefficient]) -> Coefficient:
        result = self
        for name, value in assignment.items():
            result = result.substitute(name, value)
        if not result.is_constant:
            raise InputError(f"evaluation leaves free variables in {result}")
        return result.constant_value

    def with_variables(self, variables: Sequence[str]) -> "LaurentPoly":
        """Re-embed into another variable list; dropped variables must not occur"""
        variables = tuple(variables)
        positions = []
        for i, name in enumerate(self._variables):
            if name in variables:
                positions.append((i, variables.index(name)))
            elif any(exps[i] != 0 for exps in self._terms):
                raise VariableMismatchError(f"variable {name!r} occurs in {self} but not in {variables}")
        terms = {}
        for exps, c in self._terms.items():
            key = [0] * len(variables)
            for src, dst in positions:
                key[dst] = exps[src]
            terms[tuple(key)] = c
        return LaurentPoly._trusted(variables, terms)

    def truncate(self, name: str, max_exponent: int) -> "LaurentPoly":
        i = self.index(name)
        return LaurentPoly._trusted(
            self._variables, {e: c for e, c in self._terms.items() if e[i] <= max_exponent}
        )

    def filter_terms(self, keep: Callable[[Exponents], bool]) -> "LaurentPoly":
        return LaurentPoly._trusted(self._variables, {e: c for e, c in self._terms.items() if keep(e)})

    def __repr__(self) -> str:
        return f"LaurentPoly({self._variables}, {self.sorted_terms()})"

    def __str__(self) -> str:
        from loopk.core.parsing import render_poly
        return render_poly(self)


# ============================================================================
# MODULE OPERATIONS
# ============================================================================

def lp_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    """a + b or a * b over the same variable list"""
    if a.variables != b.variables:
        raise VariableMismatchError(f"variable lists differ: {a.variables} vs {b.variables}")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise InputError(f"unknown operation {op!r}; expected 'add' or 'mul'")


def lp_exact_divide(num: LaurentPoly, den: LaurentPoly, rational: Optional[bool] = None) -> LaurentPoly:
    """
    Exact quotient num / den in the Laurent ring

    Long division by the lexicographically leading term of den. A quotient
    term outside the Newton box [min(num) - min(den), max(num) - max(den)]
    (per variable) proves that den does not divide num.

    Args:
        num: dividend
        den: nonzero divisor over the same variables
        rational: allow rational quotient coefficients (default: only when
            an input already has rational coefficients)

    Raises:
        NonExactDivisionError: carrying quotient and remainder with
            quotient * den + remainder == num
    """
    if num.variables != den.variables:
        raise VariableMismatchError(f"variable lists differ: {num.variables} vs {den.variables}")
    if den.is_zero:
        raise InputError("division by the zero polynomial")
    variables = num.variables
    if num.is_zero:
        return LaurentPoly.zero(variables)
    if rational is None:
        rational = not (num.is_integral and den.is_integral)

    low = [num.min_exponent(v) - den.min_exponent(v) for v in variables]
    high = [num.max_exponent(v) - den.max_exponent(v) for v in variables]
    lead_exps, lead_coeff = den.leading_term()

    quotient: Dict[Exponents, Coefficient] = {}
    remainder: Dict[Exponents, Coefficient] = dict(num.terms)
    while remainder:
        top = max(remainder)
        shift = tuple(a - b for a, b in zip(top, lead_exps))
        factor = exact_quotient(remainder[top], lead_coeff, rational)
        in_box = all(lo <= s <= hi for lo, s, hi in zip(low, shift, high))
        if factor is None or not in_box:
            q = LaurentPoly(variables, quotient)
            r = LaurentPoly(variables, remainder)
            raise NonExactDivisionError(
                f"{den} does not divide {num} (remainder {r})", quotient=q, remainder=r
            )
        quotient[shift] = factor
        for exps, c in den.terms.items():
            key = tuple(a + b for a, b in zip(shift, exps))
            value = remainder.get(key, 0) - factor * c
            if value == 0:
                remainder.pop(key, None)
            else:
                remainder[key] = normalize(value)
    return LaurentPoly._trusted(variables, quotient)


def lp_sum(polys: Iterable[LaurentPoly], variables: Sequence[str]) -> LaurentPoly:
    total = LaurentPoly.zero(variables)
    for p in polys:
        total = total + p
    return total


def lp_product(polys: Iterable[LaurentPoly], variables: Sequence[str]) -> LaurentPoly:
    total = LaurentPoly.one(variables)
    for p in polys:
        total = total * p
    return total

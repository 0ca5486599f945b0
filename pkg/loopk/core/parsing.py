"""
Expression grammar and canonical rendering

Grammar (whitespace ignored):

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "·" | "/") unary)*
    unary  := "-" unary | "+" unary | power
    power  := atom ("^" ["-" | "+"] INTEGER)?
    atom   := INTEGER | NAME | "(" expr ")"

Names must be declared variables. Division is exact: by a nonzero number,
by a monomial, or by a polynomial that divides the numerator.

Rendering is canonical: polynomial terms in descending lexicographic
exponent order, series terms in increasing q-degree.
"""

import re
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from loopk.core.coefficients import render_coefficient
from loopk.core.laurent import LaurentPoly, lp_exact_divide
from loopk.core.qseries import QLaurentSeries
from loopk.errors import InputError, NonExactDivisionError


GRAMMAR_VERSION = "1"

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()·]))")


def tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise InputError(f"unexpected character {text[pos:].strip()[:1]!r} at position {pos} in {text!r}")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.variables = tuple(variables)
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Tuple[str, str]:
        token = self.peek()
        if token is None:
            raise InputError(f"unexpected end of expression in {self.text!r}")
        self.pos += 1
        return token

    def expect(self, op: str) -> None:
        kind, value = self.take()
        if kind != "op" or value != op:
            raise InputError(f"expected {op!r}, found {value!r} in {self.text!r}")

    def parse(self) -> LaurentPoly:
        if not self.tokens:
            raise InputError("empty expression")
        result = self.expr()
        if self.peek() is not None:
            raise InputError(f"unexpected {self.peek()[1]!r} in {self.text!r}")
        return result

    def expr(self) -> LaurentPoly:
        result = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            right = self.term()
            result = result + right if op == "+" else result - right
        return result

    def term(self) -> LaurentPoly:
        result = self.unary()
        while self.peek() in (("op", "*"), ("op", "·"), ("op", "/")):
            _, op = self.take()
            right = self.unary()
            result = result * right if op != "/" else self.divide(result, right)
        return result

    def divide(self, num: LaurentPoly, den: LaurentPoly) -> LaurentPoly:
        if den.is_zero:
            raise InputError(f"division by zero in {self.text!r}")
        if den.is_monomial:
            return num * den.inverse_monomial()
        try:
            return lp_exact_divide(num, den)
        except NonExactDivisionError as e:
            raise InputError(f"inexact division in {self.text!r}: {e}")

    def unary(self) -> LaurentPoly:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> LaurentPoly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() in (("op", "-"), ("op", "+")):
                sign = -1 if self.take()[1] == "-" else 1
            kind, value = self.take()
            if kind != "num":
                raise InputError(f"exponent must be an integer, found {value!r} in {self.text!r}")
            return base ** (sign * int(value))
        return base

    def atom(self) -> LaurentPoly:
        kind, value = self.take()
        if kind == "num":
            return LaurentPoly.constant(self.variables, int(value))
        if kind == "name":
            if value not in self.variables:
                raise InputError(f"unknown variable {value!r}; expected one of {', '.join(self.variables) or '(none)'}")
            return LaurentPoly.variable(self.variables, value)
        if value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise InputError(f"unexpected {value!r} in {self.text!r}")


def parse_poly(text: str, variables: Sequence[str]) -> LaurentPoly:
    """Parse an expression into a LaurentPoly over the declared variables"""
    return _Parser(text, variables).parse()


def parse_series(text: str, variables: Sequence[str], order: Optional[int], q: str = "q") -> QLaurentSeries:
    """Parse a rendered series; q is the series variable"""
    if q in variables:
        raise InputError(f"series variable {q!r} clashes with coefficient variables")
    poly = parse_poly(text, tuple(variables) + (q,))
    return QLaurentSeries.from_q_polynomial(poly, q=q, order=order)


# ============================================================================
# RENDERING
# ============================================================================

def _monomial(variables: Sequence[str], exps: Sequence[int]) -> str:
    factors = []
    for name, e in zip(variables, exps):
        if e == 1:
            factors.append(name)
        elif e != 0:
            factors.append(f"{name}^{e}")
    return "*".join(factors)


def _term(variables: Sequence[str], exps: Sequence[int], coeff) -> str:
    """Term with its magnitude only; the sign is handled by the caller"""
    mono = _monomial(variables, exps)
    magnitude = abs(coeff)
    if not mono:
        return render_coefficient(magnitude)
    if magnitude == 1:
        return mono
    return f"{render_coefficient(magnitude)}*{mono}"


def render_poly(poly: LaurentPoly, compact: bool = False) -> str:
    """Canonical text, e.g. "u^3 + u + u^-1 + u^-3" ("u^3+u+u^-1+u^-3" when compact)"""
    terms = poly.sorted_terms()
    if not terms:
        return "0"
    plus, minus = ("+", "-") if compact else (" + ", " - ")
    parts = []
    for i, (exps, coeff) in enumerate(terms):
        body = _term(poly.variables, exps, coeff)
        if i == 0:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f"{minus if coeff < 0 else plus}{body}")
    return "".join(parts)


def _series_coefficient(poly: LaurentPoly) -> str:
    text = render_poly(poly)
    if len(poly) == 1 and next(iter(poly.terms.values())) > 0:
        return text
    return f"({text})"


def render_series(series: QLaurentSeries, q: str = "q") -> str:
    """Canonical text in increasing q-degree, e.g. "1 + (-L)*q^2"; the zero series is "0" """
    if series.is_zero:
        return "0"
    parts = []
    for degree, coeff in series.items():
        qpart = "" if degree == 0 else (q if degree == 1 else f"{q}^{degree}")
        if not qpart:
            parts.append(_series_coefficient(coeff))
        elif coeff == 1:
            parts.append(qpart)
        else:
            parts.append(f"{_series_coefficient(coeff)}*{qpart}")
    return " + ".join(parts)


def render_rational(value) -> str:
    return render_coefficient(Fraction(value))

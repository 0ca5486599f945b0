"""
Exact coefficients: Python ints, promoted to fractions.Fraction only when needed.

Every value leaving this module is normalized: a Fraction with denominator 1
becomes an int, so equal numbers always have one representation.
"""

from fractions import Fraction
from typing import Union

from loopk.errors import InputError


Coefficient = Union[int, Fraction]


def normalize(value: Coefficient) -> Coefficient:
    """Canonical form of an exact coefficient"""
    if isinstance(value, bool):
        raise InputError("booleans are not coefficients")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    raise InputError(f"not an exact coefficient: {value!r} ({type(value).__name__})")


def to_coefficient(value) -> Coefficient:
    """
    Parse user input into an exact coefficient

    Accepts ints, Fractions and strings such as "3", "-1/8" or "0.3".
    Floats are rejected: they have no exact meaning here.
    """
    if isinstance(value, float):
        raise InputError(f"floating point value {value!r} is not exact; pass a string such as '3/10'")
    if isinstance(value, str):
        try:
            return normalize(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse {value!r} as an exact rational")
    return normalize(value)


def exact_quotient(a: Coefficient, b: Coefficient, rational: bool) -> Coefficient:
    """
    a / b, staying integral unless rational division is allowed

    Returns None when b does not divide a in the integers and rational is False.
    """
    if b == 0:
        raise ZeroDivisionError("division by zero coefficient")
    if not rational and isinstance(a, int) and isinstance(b, int):
        if a % b != 0:
            return None
        return a // b
    return normalize(Fraction(a) / Fraction(b))


def render_coefficient(value: Coefficient) -> str:
    value = normalize(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def render_decimal(value: Coefficient) -> str:
    """Terminating decimals as "0.3", everything else as "p/q" """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    scaled = abs(value.numerator) * (10 ** places) // value.denominator
    sign = "-" if value < 0 else ""
    digits = str(scaled).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"

"""Exact rational helpers: text parsing, canonical formatting, denominators."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from csp_extform.errors import FormatError


def parse_rational(raw: object) -> Fraction:
    """Parse ``"p/q"``, an integer string or an int into a Fraction.

    Floats and bools are rejected.
    """
    if isinstance(raw, bool) or isinstance(raw, float):
        raise FormatError(f"Not an exact rational: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, Fraction):
        return raw
    if not isinstance(raw, str):
        raise FormatError(f"Not a rational: {raw!r}")
    text = raw.strip()
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"Not a rational: {raw!r}") from None


def format_rational(value: Fraction) -> str:
    """Canonical text form: ``"p/q"`` or a bare integer."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    result = 1
    for v in values:
        result = math.lcm(result, Fraction(v).denominator)
    return result


def is_exact_decimal(value: Fraction) -> bool:
    """True iff the value has a terminating decimal expansion."""
    den = Fraction(value).denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    return den == 1


def decimal_string(value: Fraction) -> str:
    """Exact decimal text of a terminating fraction (``3/8`` -> ``0.375``)."""
    value = Fraction(value)
    if not is_exact_decimal(value):
        raise ValueError(f"{value} has no terminating decimal expansion")
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    value = abs(value)
    digits = 0
    scaled = value
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    text = str(scaled.numerator).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"

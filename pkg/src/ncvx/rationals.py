"""Exact scalars: rationals plus the two infinities.

All finite arithmetic in the library runs on `fractions.Fraction`, which is
arbitrary precision and keeps numerator/denominator normalized with a
positive denominator.  Extended values (+inf, -inf) appear only as optimal
values of unbounded or infeasible problems and as function values outside a
domain; they are represented by float infinities, never carry finite
payloads, and every arithmetic step involving them goes through the guarded
helpers below so an accidental inf - inf is impossible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .errors import ParseError

PLUS_INF = float("inf")
MINUS_INF = float("-inf")

ExtReal = Union[Fraction, float]


def is_finite(v: ExtReal) -> bool:
    return isinstance(v, Fraction)


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" with optional sign. Decimal points are rejected."""
    if not isinstance(text, str):
        raise ParseError(f"rational must be a string, got {type(text).__name__}")
    s = text.strip()
    if "." in s or not s:
        raise ParseError(f"not an exact rational: {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not an exact rational: {text!r}") from exc


def format_rational(v: ExtReal) -> str:
    if v == PLUS_INF:
        return "inf"
    if v == MINUS_INF:
        return "-inf"
    return str(Fraction(v))


def ext_add(a: ExtReal, b: ExtReal) -> ExtReal:
    """Sum with infinities; opposite infinities are a caller bug."""
    if is_finite(a) and is_finite(b):
        return a + b
    if a == PLUS_INF or b == PLUS_INF:
        if a == MINUS_INF or b == MINUS_INF:
            raise ValueError("inf + -inf is undefined")
        return PLUS_INF
    return MINUS_INF


def ext_sub(a: ExtReal, b: ExtReal) -> ExtReal:
    if is_finite(b):
        return ext_add(a, -b)
    return ext_add(a, MINUS_INF if b == PLUS_INF else PLUS_INF)


def ext_min(values) -> ExtReal:
    out: ExtReal = PLUS_INF
    for v in values:
        if v == MINUS_INF:
            return MINUS_INF
        if out == PLUS_INF or (is_finite(v) and is_finite(out) and v < out):
            out = v
    return out


def ext_max(values) -> ExtReal:
    out: ExtReal = MINUS_INF
    for v in values:
        if v == PLUS_INF:
            return PLUS_INF
        if out == MINUS_INF or (is_finite(v) and is_finite(out) and v > out):
            out = v
    return out

"""Dual numeric mode: exact rationals or double floats.

Every engine accepts either ``fractions.Fraction`` (exact mode) or ``float``
values and computes in whichever arithmetic the inputs carry.  Helpers here
parse, convert, and test the mode; they are deliberately tiny so that modules
can stay generic over both instantiations.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

Numeric = "Fraction | float | int"

FLOAT_MASS_TOL = 1e-12


def is_exact(*values) -> bool:
    """True when every value is an exact rational (int or Fraction)."""
    return all(isinstance(v, Rational) for v in values)


def parse_probability(text: str) -> Fraction | float:
    """Parse a CLI/JSON probability literal.

    ``"1/3"`` and ``"0.25"`` with an exact binary expansion stay exact
    (Fraction); other decimal strings become floats.
    """
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    if "." in text or "e" in text or "E" in text:
        return float(text)
    return Fraction(int(text))


def format_probability(value) -> str:
    """Serialize a probability for CSV/JSON output (exact values as ``a/b``)."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value).limit_denominator(10**15)


def zero_like(exact: bool):
    return Fraction(0) if exact else 0.0


def one_like(exact: bool):
    return Fraction(1) if exact else 1.0

"""Parsing and formatting of exact rationals.

Every discrete computation in the package runs on :class:`fractions.Fraction`.
This module only deals with getting values in and out of that type.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

RationalLike = Union[Fraction, int, str, float]

_PQ = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")


def parse_rational(token: str) -> Fraction:
    """Parse ``p/q`` or a decimal literal (``0.25``, ``1e-3``) exactly.

    Decimals are read digit by digit, so ``"0.1"`` is exactly 1/10 and not
    the binary double nearest to it.
    """
    match = _PQ.match(token)
    if match:
        p, q = int(match.group(1)), int(match.group(2))
        if q == 0:
            raise ValueError(f"zero denominator in {token!r}")
        return Fraction(p, q)
    try:
        value = Decimal(token.strip())
    except InvalidOperation:
        raise ValueError(f"not a rational literal: {token!r}") from None
    if not value.is_finite():
        raise ValueError(f"not a finite rational: {token!r}")
    return Fraction(value)


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction.

    Floats go through their shortest ``repr`` so that ``0.3`` becomes 3/10;
    callers wanting the exact binary value should pass ``Fraction(x)``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"not a finite rational: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def format_rational(value: Fraction | int) -> str:
    """Render as ``"p/q"``; the denominator is always written, even when 1."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def nearest_with_denominator(value: float, denominator: int) -> Fraction:
    """Closest rational ``p/denominator`` to a float (ties to even)."""
    return Fraction(round(Fraction(value) * denominator), denominator)

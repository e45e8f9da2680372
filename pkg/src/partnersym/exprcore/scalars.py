"""Two-mode scalars: exact rationals (``Fraction``) and doubles (``float``).

Python's own numeric tower already promotes ``Fraction op float`` to
``float``; the helpers here only normalise inputs and make the mode of a
value explicit so callers can tell whether a result is still exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]

ZERO = Fraction(0)
ONE = Fraction(1)


def scalar(value) -> Scalar:
    """Coerce ints, strings, Fractions and floats to a Scalar.

    Strings accept ``"3"``, ``"-3/2"`` (exact) and ``"1.5"``/``"1e-3"`` (float).
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite scalar {value!r}")
        return value
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE") and "/" not in text:
            return scalar(float(text))
        return Fraction(text)
    # numpy scalars and the like
    if hasattr(value, "__float__"):
        return scalar(float(value))
    raise TypeError(f"cannot interpret {value!r} as a scalar")


def is_exact(value) -> bool:
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def to_float(value) -> float:
    return float(value)


def format_scalar(value: Scalar) -> str:
    """Text form that :func:`scalar` (and the expression parser) reads back."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def exact_sqrt(value: Scalar) -> Scalar:
    """Square root, exact when ``value`` is the square of a rational."""
    if value < 0:
        raise ValueError("square root of a negative scalar")
    if isinstance(value, Fraction):
        num, den = value.numerator, value.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd)
    return math.sqrt(float(value))


def exp(value: Scalar) -> Scalar:
    if value == 0:
        return ONE
    return math.exp(float(value))


def sin(value: Scalar) -> Scalar:
    if value == 0:
        return ZERO
    return math.sin(float(value))


def cos(value: Scalar) -> Scalar:
    if value == 0:
        return ONE
    return math.cos(float(value))

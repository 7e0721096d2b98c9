"""Exact rational helpers built on gmpy2's ``mpq``."""

from fractions import Fraction
from numbers import Integral

from gmpy2 import mpq

from .errors import InputError

__all__ = ["mpq", "Q", "fmt"]

_MPQ = type(mpq(0))


def Q(value):
    """Coerce ``value`` to an exact ``mpq``.

    Accepts ints, Fractions, mpq, and strings such as ``"3/10"`` or ``"0.3"``.
    Floats are converted through their shortest repr so ``0.3`` means 3/10.
    """
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, Integral):
        return mpq(int(value))
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        value = repr(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return mpq(int(num), int(den))
            return mpq(Fraction(text).numerator, Fraction(text).denominator)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    try:
        return mpq(value)
    except (TypeError, ValueError) as exc:
        raise InputError(f"not a rational: {value!r}") from exc


def fmt(q):
    """Format a rational as ``p/q`` (or ``p`` when integral)."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


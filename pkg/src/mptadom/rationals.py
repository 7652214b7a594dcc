"""Exact rational helpers and the "p/q" wire format.

Every number that can influence a verdict is a Fraction.  JSON carries
rationals as integers, decimal strings, or "p/q" strings so that no value
passes through binary floating point.
"""

from fractions import Fraction

Rat = Fraction


def parse_rational(value) -> Fraction:
    """Parse an int, "p/q" string, or decimal string into a Fraction."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    if isinstance(value, float):
        raise ValueError(f"refusing binary float {value!r}; write it as a string")
    raise ValueError(f"not a rational: {value!r}")


def format_rational(q: Fraction):
    """Render a Fraction for JSON: ints stay ints, the rest become "p/q"."""
    q = Fraction(q)
    if q.denominator == 1:
        return int(q)
    return f"{q.numerator}/{q.denominator}"

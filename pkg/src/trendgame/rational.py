"""Exact-rational coercion shared by the config types."""

from __future__ import annotations

from fractions import Fraction


def as_fraction(value) -> Fraction:
    """Coerce a config value to an exact Fraction.

    Accepts Fraction, int, and strings like "3/2" or "0.005".  Floats are
    converted through their shortest decimal repr, so 0.005 means 1/200
    rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")

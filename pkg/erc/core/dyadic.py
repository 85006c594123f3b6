"""Dyadic rationals m * 2^e with exact arithmetic and directed rounding."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction, "Dyadic"]

_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*\*\s*2\^\s*(-?\d+)\s*$")


class Dyadic:
    """An exact dyadic rational ``mantissa * 2**exponent``.

    Instances are kept in normal form: the mantissa is odd, or it is zero and
    then the exponent is zero as well. Two equal values therefore always have
    identical fields.
    """

    __slots__ = ("mantissa", "exponent")

    mantissa: int
    exponent: int

    def __init__(self, mantissa: int, exponent: int = 0) -> None:
        if mantissa == 0:
            exponent = 0
        else:
            shift = (mantissa & -mantissa).bit_length() - 1
            mantissa >>= shift
            exponent += shift
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Dyadic is immutable")

    # -- construction -------------------------------------------------------

    @classmethod
    def coerce(cls, value: Rational) -> "Dyadic":
        """Convert an int or Dyadic; Fractions must have a power-of-two denominator."""
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not a dyadic rational")
            return cls(value.numerator, -(den.bit_length() - 1))
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Inverse of ``str``: parse ``m*2^e``."""
        match = _DYADIC_RE.match(text)
        if not match:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(match.group(1)), int(match.group(2)))

    @classmethod
    def floor_at(cls, value: Rational, exponent: int) -> "Dyadic":
        """Largest multiple of ``2**exponent`` not above ``value``."""
        q = _as_fraction(value)
        if exponent >= 0:
            m = q.numerator // (q.denominator << exponent)
        else:
            m = (q.numerator << -exponent) // q.denominator
        return cls(m, exponent)

    @classmethod
    def ceil_at(cls, value: Rational, exponent: int) -> "Dyadic":
        """Smallest multiple of ``2**exponent`` not below ``value``."""
        return -cls.floor_at(-_as_fraction(value), exponent)

    # -- conversions --------------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    @property
    def magnitude_bits(self) -> int:
        """An integer k with |self| < 2**k."""
        return self.mantissa.bit_length() + self.exponent if self.mantissa else 0

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: Rational) -> "Dyadic":
        other = Dyadic.coerce(other)
        e = min(self.exponent, other.exponent)
        m = (self.mantissa << (self.exponent - e)) + (other.mantissa << (other.exponent - e))
        return Dyadic(m, e)

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mantissa, self.exponent)

    def __sub__(self, other: Rational) -> "Dyadic":
        return self + (-Dyadic.coerce(other))

    def __rsub__(self, other: Rational) -> "Dyadic":
        return Dyadic.coerce(other) - self

    def __mul__(self, other: Rational) -> "Dyadic":
        other = Dyadic.coerce(other)
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __abs__(self) -> "Dyadic":
        return self if self.mantissa >= 0 else -self

    def shift(self, k: int) -> "Dyadic":
        """Multiply by ``2**k`` exactly."""
        return Dyadic(self.mantissa, self.exponent + k)

    # -- ordering -----------------------------------------------------------

    def _compare(self, other: object) -> int:
        if isinstance(other, Fraction):
            diff = self.to_fraction() - other
            return (diff > 0) - (diff < 0)
        o = Dyadic.coerce(other)  # type: ignore[arg-type]
        return (self - o).sign()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (Dyadic, int, Fraction)):
            return self._compare(other) == 0
        return NotImplemented

    def __lt__(self, other: Rational) -> bool:
        return self._compare(other) < 0

    def __le__(self, other: Rational) -> bool:
        return self._compare(other) <= 0

    def __gt__(self, other: Rational) -> bool:
        return self._compare(other) > 0

    def __ge__(self, other: Rational) -> bool:
        return self._compare(other) >= 0

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __str__(self) -> str:
        return f"{self.mantissa}*2^{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({self.mantissa}, {self.exponent})"


ZERO = Dyadic(0)
ONE = Dyadic(1)


def _as_fraction(value: Rational) -> Fraction:
    if isinstance(value, Dyadic):
        return value.to_fraction()
    return Fraction(value)

"""Closed intervals with dyadic endpoints and outward rounding."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from erc.core.dyadic import Dyadic, Rational

# Trimming rounds endpoints outward onto the grid 2^(p - TRIM_GUARD).
TRIM_GUARD = 2


@dataclass(frozen=True)
class DyadicInterval:
    """The enclosure ``[lo, hi]``; invariant ``lo <= hi``."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: Rational) -> "DyadicInterval":
        d = Dyadic.coerce(value)
        return cls(d, d)

    @classmethod
    def around(cls, value: Rational, exponent: int) -> "DyadicInterval":
        """Outward rounding of a rational onto the grid ``2**exponent``."""
        return cls(Dyadic.floor_at(value, exponent), Dyadic.ceil_at(value, exponent))

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo.to_fraction() + self.hi.to_fraction()) / 2

    @property
    def magnitude(self) -> Dyadic:
        """Largest absolute value in the interval."""
        return max(abs(self.lo), abs(self.hi))

    def fits(self, p: int) -> bool:
        """True when the width is at most ``2**p``."""
        return self.width <= Dyadic(1, p)

    def contains(self, value: Union[Rational, Fraction]) -> bool:
        return self.lo <= value <= self.hi

    def contains_zero(self) -> bool:
        return self.lo.sign() <= 0 <= self.hi.sign()

    def intersect(self, other: "DyadicInterval") -> "DyadicInterval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError(f"disjoint enclosures {self} and {other}")
        return DyadicInterval(lo, hi)

    def widen(self, radius: Dyadic) -> "DyadicInterval":
        return DyadicInterval(self.lo - radius, self.hi + radius)

    def trim(self, p: int) -> "DyadicInterval":
        """Round endpoints outward to the grid ``2**(p - TRIM_GUARD)``.

        Bounds mantissas to about ``|p| + magnitude`` bits and widens by at
        most ``2**(p - 1)``.
        """
        e = p - TRIM_GUARD
        lo = self.lo if self.lo.exponent >= e else Dyadic.floor_at(self.lo, e)
        hi = self.hi if self.hi.exponent >= e else Dyadic.ceil_at(self.hi, e)
        return DyadicInterval(lo, hi)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "DyadicInterval":
        return DyadicInterval(-self.hi, -self.lo)

    def __add__(self, other: "DyadicInterval") -> "DyadicInterval":
        return DyadicInterval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "DyadicInterval") -> "DyadicInterval":
        return DyadicInterval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other: "DyadicInterval") -> "DyadicInterval":
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return DyadicInterval(min(products), max(products))

    def divide(self, other: "DyadicInterval", exponent: int) -> "DyadicInterval":
        """Quotient rounded outward onto ``2**exponent``; ``other`` must exclude 0."""
        if other.contains_zero():
            raise ZeroDivisionError(f"denominator enclosure {other} contains 0")
        quotients = [
            a.to_fraction() / b.to_fraction()
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        return DyadicInterval(
            Dyadic.floor_at(min(quotients), exponent),
            Dyadic.ceil_at(max(quotients), exponent),
        )

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"

"""Exact reals as precision-indexed enclosure maps.

A RealNum is queried top-down: ``approx(x, p)`` returns a dyadic interval of
width at most 2^p that contains the denoted real. Every node memoizes the
intersection of everything it has returned, so repeated or coarser queries are
answered from the cache.
"""

from __future__ import annotations

import logging
import threading
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from erc.core.budget import BudgetLike, BudgetMeter, as_meter
from erc.core.dyadic import Dyadic
from erc.core.interval import DyadicInterval
from erc.errors import BudgetExhausted

logger = logging.getLogger(__name__)

Approximator = Callable[[int, BudgetMeter], DyadicInterval]

# Exact rational shadows are dropped once numerator plus denominator exceed this.
SHADOW_BITS = 4096

BINOPS = ("add", "sub", "mul", "div")


class RealNum:
    """An immutable real number with a lazily refined, cached enclosure."""

    __slots__ = ("_approximator", "_exact", "_cache", "_lock", "label")

    def __init__(
        self,
        approximator: Approximator,
        exact: Optional[Fraction] = None,
        label: str = "real",
    ) -> None:
        self._approximator = approximator
        self._exact = _bounded(exact)
        self._cache: Optional[DyadicInterval] = None
        self._lock = threading.Lock()
        self.label = label

    @property
    def exact(self) -> Optional[Fraction]:
        """The exact rational value when it is known and small, else None."""
        return self._exact

    @property
    def cache(self) -> Optional[DyadicInterval]:
        return self._cache

    def approx(self, p: int, budget: Optional[BudgetLike] = None) -> DyadicInterval:
        meter = as_meter(budget)
        meter.check_precision(p)
        cached = self._cache
        if cached is not None and cached.fits(p):
            return cached
        meter.charge()
        if self._exact is not None:
            fresh = DyadicInterval.around(self._exact, p - 1)
        else:
            fresh = self._approximator(p, meter)
        with self._lock:
            merged = fresh if self._cache is None else self._cache.intersect(fresh)
            self._cache = merged
        return merged

    def __repr__(self) -> str:
        if self._exact is not None:
            return f"RealNum({self.label}={self._exact})"
        return f"RealNum({self.label}, cache={self._cache})"


def approx(x: RealNum, p: int, budget: Optional[BudgetLike] = None) -> DyadicInterval:
    """Enclosure of ``x`` with width at most ``2**p``."""
    return x.approx(p, budget)


def _bounded(q: Optional[Fraction]) -> Optional[Fraction]:
    if q is None:
        return None
    if q.numerator.bit_length() + q.denominator.bit_length() > SHADOW_BITS:
        return None
    return q


def _bits(interval: DyadicInterval) -> int:
    """Smallest k >= 0 with every point of ``interval`` inside [-2^k, 2^k]."""
    return max(0, interval.magnitude.magnitude_bits)


# -- constructors ------------------------------------------------------------


def real_from_fraction(value: Union[int, Fraction]) -> RealNum:
    q = Fraction(value)

    def approximator(p: int, meter: BudgetMeter) -> DyadicInterval:
        return DyadicInterval.around(q, p - 1)

    return RealNum(approximator, exact=q, label=str(q))


def real_from_integer(n: int) -> RealNum:
    return real_from_fraction(Fraction(n))


def iota(p: int) -> RealNum:
    """The binary precision embedding: denotes 2^p exactly."""
    point = DyadicInterval.point(Dyadic(1, p))

    def approximator(q: int, meter: BudgetMeter) -> DyadicInterval:
        return point

    return RealNum(approximator, exact=point.lo.to_fraction(), label=f"iota({p})")


# -- arithmetic --------------------------------------------------------------


def real_neg(a: RealNum) -> RealNum:
    def approximator(p: int, meter: BudgetMeter) -> DyadicInterval:
        return -a.approx(p, meter)

    exact = -a.exact if a.exact is not None else None
    return RealNum(approximator, exact=exact, label="neg")


def _add(a: RealNum, b: RealNum) -> Approximator:
    def approximator(p: int, meter: BudgetMeter) -> DyadicInterval:
        return (a.approx(p - 2, meter) + b.approx(p - 2, meter)).trim(p)

    return approximator


def _sub(a: RealNum, b: RealNum) -> Approximator:
    def approximator(p: int, meter: BudgetMeter) -> DyadicInterval:
        return (a.approx(p - 2, meter) - b.approx(p - 2, meter)).trim(p)

    return approximator


def _mul(a: RealNum, b: RealNum) -> Approximator:
    def approximator(p: int, meter: BudgetMeter) -> DyadicInterval:
        ka = _bits(a.approx(0, meter))
        kb = _bits(b.approx(0, meter))
        ia = a.approx(p - 3 - kb, meter)
        ib = b.approx(p - 3 - ka, meter)
        return (ia * ib).trim(p)

    return approximator


def separate_from_zero(b: RealNum, meter: BudgetMeter) -> DyadicInterval:
    """Refine ``b`` at p = -1, -2, -4, ... until its enclosure excludes 0."""
    q = -1
    while True:
        q = max(q, meter.min_precision)
        enclosure = b.approx(q, meter)
        if not enclosure.contains_zero():
            return enclosure
        if q == meter.min_precision:
            raise BudgetExhausted(
                f"denominator not separated from 0 at precision 2^{q} (possible division by zero)",
                reason="precision",
            )
        logger.debug("denominator still straddles 0 at 2^%d", q)
        q *= 2


def _div(a: RealNum, b: RealNum) -> Approximator:
    def approximator(p: int, meter: BudgetMeter) -> DyadicInterval:
        separated = separate_from_zero(b, meter)
        smallest = min(abs(separated.lo), abs(separated.hi))
        lb = smallest.magnitude_bits - 1  # smallest >= 2^lb
        ka = _bits(a.approx(0, meter))
        ia = a.approx(p - 3 + lb, meter)
        ib = b.approx(min(p - 3 + 2 * lb - ka, -1), meter)
        return ia.divide(ib, p - 2)

    return approximator


_APPROXIMATORS = {"add": _add, "sub": _sub, "mul": _mul, "div": _div}


def real_binop(op: str, a: RealNum, b: RealNum) -> RealNum:
    """Exact field operation ``a op b`` for op in add, sub, mul, div."""
    try:
        build = _APPROXIMATORS[op]
    except KeyError:
        raise ValueError(f"unknown real operation {op!r}; expected one of {BINOPS}") from None
    exact: Optional[Fraction] = None
    if a.exact is not None and b.exact is not None:
        if op == "add":
            exact = a.exact + b.exact
        elif op == "sub":
            exact = a.exact - b.exact
        elif op == "mul":
            exact = a.exact * b.exact
        elif b.exact != 0:
            exact = a.exact / b.exact
    return RealNum(build(a, b), exact=exact, label=op)


def real_polynomial(coefficients: Sequence[Fraction], x: RealNum) -> RealNum:
    """Horner evaluation; ``coefficients`` are listed from the leading term down."""
    if not coefficients:
        return real_from_integer(0)
    acc = real_from_fraction(coefficients[0])
    for c in coefficients[1:]:
        acc = real_binop("add", real_binop("mul", acc, x), real_from_fraction(c))
    return acc


# -- tests and limits --------------------------------------------------------


def gt_partial(x: RealNum, y: RealNum, budget: Optional[BudgetLike] = None) -> int:
    """The partial test ``x > y``: 1 if x > y, 0 if x < y, exhaustion on equality."""
    meter = as_meter(budget)
    p = 0
    while True:
        p = max(p, meter.min_precision)
        meter.charge()
        ix = x.approx(p, meter)
        iy = y.approx(p, meter)
        if ix.lo > iy.hi:
            return 1
        if ix.hi < iy.lo:
            return 0
        if p == meter.min_precision:
            raise BudgetExhausted(
                f"operands still overlap at precision 2^{p} (possibly equal reals)",
                reason="precision",
            )
        p = p * 2 if p < 0 else -1


def limit(producer: Callable[[int], RealNum], label: str = "limit") -> RealNum:
    """The real denoted by a sequence whose p-th member is within 2^p of it.

    A query at q evaluates ``producer(q - 2)`` and encloses that value at q - 1;
    widening by the producer's error keeps the total width within 2^q.
    """

    def approximator(q: int, meter: BudgetMeter) -> DyadicInterval:
        member = producer(q - 2)
        return member.approx(q - 1, meter).widen(Dyadic(1, q - 2))

    return RealNum(approximator, label=label)

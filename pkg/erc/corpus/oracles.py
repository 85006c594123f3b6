"""Exact rational references for the corpus programs.

Nothing here touches the evaluator: inputs and observed enclosures are plain
``Fraction`` values, so a wrong interpreter cannot make its own oracle agree.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import FrozenSet, List, Sequence, Tuple

from erc.corpus.functions import Polynomial

Enclosure = Tuple[Fraction, Fraction]
Matrix = Sequence[Sequence[Fraction]]

EXP_LOG2_N = 40
EXP_GRID = -256


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


def distance_bound(enclosure: Enclosure, bracket: Enclosure) -> Fraction:
    """Largest ``|z - t|`` for z in ``enclosure`` and t in ``bracket``."""
    lo, hi = enclosure
    b_lo, b_hi = bracket
    return max(hi - b_lo, b_hi - lo)


def root_bracket(
    poly: Polynomial, width: Fraction, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1)
) -> Enclosure:
    """Bracket of width at most ``width`` around the root of ``poly`` in ``[lo, hi]``.

    Exact sign bisection; a midpoint that is a root returns a point bracket.

    Raises:
        ValueError: ``poly`` has no sign change on ``[lo, hi]``.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    s_lo, s_hi = _sign(poly.at(lo)), _sign(poly.at(hi))
    if s_lo == 0:
        return lo, lo
    if s_hi == 0:
        return hi, hi
    if s_lo == s_hi:
        raise ValueError(f"{poly} has no sign change on [{lo}, {hi}]")
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = _sign(poly.at(mid))
        if s_mid == 0:
            return mid, mid
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _floor_at(q: Fraction, exponent: int) -> Fraction:
    scale = Fraction(2) ** -exponent
    return Fraction(math.floor(q * scale)) / scale


def _ceil_at(q: Fraction, exponent: int) -> Fraction:
    scale = Fraction(2) ** -exponent
    return Fraction(math.ceil(q * scale)) / scale


def _bracket_nonnegative(x: Fraction, log2_n: int, grid: int) -> Enclosure:
    base = 1 + x / Fraction(2) ** log2_n
    low, high = _floor_at(base, grid), _ceil_at(base, grid)
    for _ in range(log2_n):
        low = _floor_at(low * low, grid)
        high = _ceil_at(high * high, grid)
    # (1 + x/n)^n <= exp(x) <= (1 + x/n)^(n+1)
    return low, _ceil_at(high * _ceil_at(base, grid), grid)


def exp_bracket(x: Fraction, log2_n: int = EXP_LOG2_N, grid: int = EXP_GRID) -> Enclosure:
    """Rational bounds on ``exp(x)`` from ``n = 2^log2_n``, rounded outward on the grid ``2^grid``.

    Negative arguments use ``exp(x) = 1 / exp(-x)``.
    """
    x = Fraction(x)
    if x >= 0:
        return _bracket_nonnegative(x, log2_n, grid)
    low, high = _bracket_nonnegative(-x, log2_n, grid)
    return 1 / high, 1 / low


def round_admissible(x: Fraction) -> FrozenSet[int]:
    """All integers k with ``|x - k| < 1``."""
    x = Fraction(x)
    floor = math.floor(x)
    if x == floor:
        return frozenset({floor})
    return frozenset({floor, floor + 1})


def round_scaling_bound(x: Fraction) -> int:
    """Most halvings Round's first loop can make; the second loop makes as many digit steps.

    The loop may stop once ``|y| < 1`` and may go on while ``|y| > 1/2``, so it
    runs the binary length of ``floor(|x|)`` rounds, plus one when both hold.
    """
    return math.floor(abs(Fraction(x))).bit_length() + 1


def pivot_admissible(M: Sequence[Fraction]) -> FrozenSet[int]:
    """Indices a pivot search may return: the nonzero entries."""
    return frozenset(i for i, v in enumerate(M) if v != 0)


def pivot_soft_candidates(M: Sequence[Fraction]) -> FrozenSet[int]:
    """Indices whose magnitude reaches half the maximum, the ones a soft test can settle on."""
    largest = max((abs(v) for v in M), default=Fraction(0))
    return frozenset(i for i, v in enumerate(M) if v != 0 and 2 * abs(v) >= largest)


def trisection_round_bound(p: int) -> int:
    """``ceil(log_{3/2}(2^(1-p))) + 2``: the bracket shrinks by 2/3 per round."""
    rounds = 0
    width = Fraction(1)
    target = Fraction(2) ** (p - 1)
    while width > target:
        width = width * 2 / 3
        rounds += 1
    return rounds + 2


def matrix_rank(A: Matrix) -> int:
    rows = [[Fraction(v) for v in row] for row in A]
    rank = 0
    columns = len(rows[0]) if rows else 0
    for col in range(columns):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col] / rows[rank][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def residual_norm(A: Matrix, x: Sequence[Fraction]) -> Fraction:
    """``max_i |sum_j A[i][j] * x[j]|``."""
    return max((abs(sum(Fraction(a) * v for a, v in zip(row, x))) for row in A), default=Fraction(0))


def midpoints(enclosures: Sequence[Enclosure]) -> List[Fraction]:
    return [(lo + hi) / 2 for lo, hi in enclosures]

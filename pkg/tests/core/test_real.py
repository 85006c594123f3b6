import random
from fractions import Fraction

import pytest

from erc.core.budget import EvalBudget, as_meter
from erc.core.dyadic import Dyadic
from erc.core.interval import DyadicInterval
from erc.core.real import (
    RealNum,
    gt_partial,
    iota,
    limit,
    real_binop,
    real_from_fraction,
    real_from_integer,
    real_neg,
    real_polynomial,
    separate_from_zero,
)
from erc.errors import BudgetExhausted


def opaque(value: Fraction) -> RealNum:
    """``value`` without its exact shadow, so arithmetic must refine."""

    def approximator(p, meter):
        return DyadicInterval.around(value, p - 1)

    return RealNum(approximator, label="opaque")


def test_iota_is_exact():
    assert iota(-3).exact == Fraction(1, 8)
    assert iota(5).approx(-10).width == 0


@pytest.mark.parametrize("p", [0, -1, -7, -30])
def test_approx_width_and_containment(p):
    third = real_from_fraction(Fraction(1, 3))
    enclosure = third.approx(p)
    assert enclosure.fits(p)
    assert enclosure.contains(Fraction(1, 3))


def test_exact_shadow_propagates():
    x = real_binop("div", real_from_integer(1), real_from_integer(3))
    assert x.exact == Fraction(1, 3)
    assert real_neg(x).exact == Fraction(-1, 3)
    assert real_binop("mul", x, real_from_integer(3)).exact == 1


@pytest.mark.parametrize(
    "op, expected",
    [("add", Fraction(5, 6)), ("sub", Fraction(-1, 6)), ("mul", Fraction(1, 6)), ("div", Fraction(2, 3))],
)
def test_binop_without_shadow(op, expected):
    a, b = opaque(Fraction(1, 3)), opaque(Fraction(1, 2))
    result = real_binop(op, a, b)
    assert result.exact is None
    for p in (-4, -20, -60):
        enclosure = result.approx(p)
        assert enclosure.fits(p)
        assert enclosure.contains(expected)


def test_unknown_binop():
    with pytest.raises(ValueError):
        real_binop("pow", real_from_integer(1), real_from_integer(2))


def test_cache_is_intersection_of_answers():
    x = opaque(Fraction(2, 7))
    coarse = x.approx(-4)
    fine = x.approx(-20)
    assert x.cache == fine
    assert coarse.contains(fine.lo) and coarse.contains(fine.hi)
    assert x.approx(-4) is x.cache


def test_polynomial_leading_first():
    x = real_from_fraction(Fraction(1, 2))
    # x^2 - 3x + 2
    value = real_polynomial([Fraction(1), Fraction(-3), Fraction(2)], x)
    assert value.exact == Fraction(3, 4)
    assert real_polynomial([], x).exact == 0


def test_gt_partial_decides_distinct_reals():
    a, b = opaque(Fraction(1, 3)), opaque(Fraction(1, 3) + Fraction(1, 1000))
    assert gt_partial(b, a) == 1
    assert gt_partial(a, b) == 0


def test_gt_partial_exhausts_on_equality():
    a = opaque(Fraction(1, 3))
    budget = EvalBudget(min_precision=-64)
    with pytest.raises(BudgetExhausted) as info:
        gt_partial(a, opaque(Fraction(1, 3)), budget)
    assert info.value.reason == "precision"
    assert info.value.exit_code == 4


def test_division_by_zero_exhausts():
    zero = opaque(Fraction(0))
    quotient = real_binop("div", real_from_integer(1), zero)
    with pytest.raises(BudgetExhausted):
        quotient.approx(-4, EvalBudget(min_precision=-32))


def test_separate_from_zero():
    meter = as_meter(EvalBudget(min_precision=-64))
    enclosure = separate_from_zero(opaque(Fraction(-1, 1000)), meter)
    assert not enclosure.contains_zero()
    assert enclosure.hi < 0


def test_limit_of_truncations():
    third = Fraction(1, 3)

    def producer(p: int) -> RealNum:
        return real_from_fraction(Dyadic.floor_at(third, p).to_fraction())

    x = limit(producer)
    for p in (-3, -17, -50):
        enclosure = x.approx(p)
        assert enclosure.fits(p)
        assert enclosure.contains(third)


def test_precision_below_budget_exhausts():
    with pytest.raises(BudgetExhausted):
        real_from_integer(1).approx(-100, EvalBudget(min_precision=-50))


def random_fraction(rng: random.Random) -> Fraction:
    value = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
    return value or Fraction(1, 7)


def test_arithmetic_matches_rationals():
    rng = random.Random(1000)
    oracle = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
        "div": lambda a, b: a / b,
    }
    for _ in range(1000):
        a, b = random_fraction(rng), random_fraction(rng)
        op = rng.choice(sorted(oracle))
        p = rng.randint(-60, 0)
        cases = [(real_from_fraction(a), a), (real_binop(op, opaque(a), opaque(b)), oracle[op](a, b))]
        for x, expected in cases:
            enclosure = x.approx(p)
            assert enclosure.fits(p), (op, a, b, p)
            assert enclosure.contains(expected), (op, a, b, p)


def test_gt_partial_matches_rationals():
    rng = random.Random(1001)
    budget = EvalBudget(min_precision=-64)
    for i in range(1000):
        a = random_fraction(rng)
        b = a if i % 10 == 0 else random_fraction(rng)
        if a == b:
            with pytest.raises(BudgetExhausted):
                gt_partial(opaque(a), opaque(b), budget)
        else:
            assert gt_partial(opaque(a), opaque(b), budget) == int(a > b), (a, b)


def test_iota_homomorphisms():
    def dyadic(k: int) -> Dyadic:
        enclosure = iota(k).approx(min(k, 0))
        assert enclosure.width == 0
        return enclosure.lo

    for p in range(-64, 65):
        for q in range(-64, 65):
            product = real_binop("mul", iota(p), iota(q))
            quotient = real_binop("div", iota(p), iota(q))
            assert product.exact == iota(p + q).exact
            assert quotient.exact == iota(p - q).exact
            assert dyadic(p) * dyadic(q) == dyadic(p + q)
            assert dyadic(p).shift(-q) == dyadic(p - q)

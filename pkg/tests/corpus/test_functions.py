from fractions import Fraction

import pytest

from erc.core.real import real_from_fraction
from erc.corpus.functions import TEST_FUNCTIONS, Polynomial, bound_function

CUBIC = TEST_FUNCTIONS["cubic"]


def test_exact_evaluation():
    assert TEST_FUNCTIONS["linear_2x_minus_1"].at(Fraction(1, 2)) == 0
    assert TEST_FUNCTIONS["affine_x_minus_third"].at(1) == Fraction(2, 3)
    assert CUBIC.at(Fraction(-1, 2)) == 0
    assert CUBIC.degree == 3


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (0, 1, 1),
        (-1, 1, 3),
        (Fraction(-1, 2), 0, 2),
        (Fraction(-1, 4), Fraction(1, 2), 0),
        (1, 0, 0),
    ],
)
def test_sturm_root_count(a, b, expected):
    # roots at -1/2 and (1 +- sqrt 5) / 4
    assert CUBIC.count_roots(a, b) == expected


def test_root_count_closed_at_both_ends():
    half = TEST_FUNCTIONS["shifted_half"]
    assert half.count_roots(Fraction(1, 2), 1) == 1
    assert half.count_roots(0, Fraction(1, 2)) == 1
    assert half.count_roots(Fraction(1, 2), Fraction(1, 2)) == 1


def test_zero_polynomial_has_no_count():
    with pytest.raises(ValueError):
        Polynomial.of("zero", 0).count_roots(0, 1)


def test_call_on_reals():
    value = TEST_FUNCTIONS["linear_2x_minus_1"](real_from_fraction(Fraction(3, 4)))
    assert value.approx(-20).contains(Fraction(1, 2))


def test_bound_function():
    assert bound_function("cubic") is CUBIC
    assert str(CUBIC) == "x^3 - x/2 - 1/8"
    with pytest.raises(KeyError, match="unknown test function"):
        bound_function("quartic")

from fractions import Fraction

import pytest

from erc.core.dyadic import Dyadic


def test_normal_form():
    assert (Dyadic(12, 0).mantissa, Dyadic(12, 0).exponent) == (3, 2)
    assert (Dyadic(0, 7).mantissa, Dyadic(0, 7).exponent) == (0, 0)
    assert Dyadic(6, -1) == Dyadic(3, 0)


def test_coerce_fraction():
    assert Dyadic.coerce(Fraction(3, 8)) == Dyadic(3, -3)
    with pytest.raises(ValueError):
        Dyadic.coerce(Fraction(1, 3))
    with pytest.raises(TypeError):
        Dyadic.coerce(0.5)


def test_parse_and_str():
    d = Dyadic.parse("-5*2^-3")
    assert d == Fraction(-5, 8)
    assert str(d) == "-5*2^-3"
    assert Dyadic.parse(str(Dyadic(40, 1))) == Dyadic(40, 1)
    with pytest.raises(ValueError):
        Dyadic.parse("5/8")


def test_directed_rounding():
    third = Fraction(1, 3)
    assert Dyadic.floor_at(third, -2) == Fraction(1, 4)
    assert Dyadic.ceil_at(third, -2) == Fraction(1, 2)
    assert Dyadic.floor_at(Fraction(-1, 3), -2) == Fraction(-1, 2)
    assert Dyadic.floor_at(7, 2) == 4
    assert Dyadic.ceil_at(7, 2) == 8
    assert Dyadic.floor_at(Fraction(1, 2), -1) == Fraction(1, 2)


def test_arithmetic():
    a, b = Dyadic(3, -2), Dyadic(5, -1)
    assert a + b == Fraction(13, 4)
    assert a - b == Fraction(-7, 4)
    assert a * b == Fraction(15, 8)
    assert -a == Fraction(-3, 4)
    assert abs(Dyadic(-3, 1)) == 6
    assert a.shift(3) == 6
    assert 1 + a == Fraction(7, 4)


def test_ordering_and_hash():
    assert Dyadic(1, -1) < Dyadic(3, -2) < 1
    assert Dyadic(1, -1) == Fraction(1, 2)
    assert hash(Dyadic(2, 0)) == hash(Dyadic(1, 1))
    assert {Dyadic(2, 0), Dyadic(1, 1)} == {Dyadic(4, -1)}


def test_magnitude_bits_and_sign():
    assert Dyadic(5, 0).magnitude_bits == 3
    assert abs(Dyadic(7, -2).to_fraction()) < 2 ** Dyadic(7, -2).magnitude_bits
    assert Dyadic(0).magnitude_bits == 0
    assert (Dyadic(-1).sign(), Dyadic(0).sign(), Dyadic(1).sign()) == (-1, 0, 1)


def test_immutable():
    with pytest.raises(AttributeError):
        Dyadic(1).mantissa = 3

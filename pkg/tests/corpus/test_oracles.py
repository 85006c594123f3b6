from fractions import Fraction

import pytest

from erc.corpus.functions import TEST_FUNCTIONS, Polynomial
from erc.corpus.oracles import (
    distance_bound,
    exp_bracket,
    matrix_rank,
    midpoints,
    pivot_admissible,
    pivot_soft_candidates,
    residual_norm,
    root_bracket,
    round_admissible,
    round_scaling_bound,
    trisection_round_bound,
)

E_LOW, E_HIGH = Fraction(2718281828, 10**9), Fraction(2718281829, 10**9)


def test_root_bracket():
    assert root_bracket(TEST_FUNCTIONS["shifted_half"], Fraction(1, 1024)) == (Fraction(1, 2), Fraction(1, 2))
    lo, hi = root_bracket(TEST_FUNCTIONS["affine_x_minus_third"], Fraction(2) ** -20)
    assert lo < Fraction(1, 3) < hi
    assert hi - lo <= Fraction(2) ** -20


def test_root_bracket_needs_sign_change():
    with pytest.raises(ValueError, match="no sign change"):
        root_bracket(Polynomial.of("far", -2, 1), Fraction(1, 8))


def test_distance_bound():
    assert distance_bound((Fraction(0), Fraction(1)), (Fraction(1, 2), Fraction(1, 2))) == Fraction(1, 2)
    assert distance_bound((Fraction(1), Fraction(1)), (Fraction(1), Fraction(1))) == 0


def test_exp_bracket():
    assert exp_bracket(Fraction(0)) == (1, 1)
    lo, hi = exp_bracket(Fraction(1))
    assert lo < E_HIGH and hi > E_LOW
    assert hi - lo < Fraction(2) ** -30


def test_exp_bracket_negative():
    lo, hi = exp_bracket(Fraction(-1))
    assert lo < 1 / E_LOW and hi > 1 / E_HIGH
    assert lo <= hi


@pytest.mark.parametrize(
    "x, expected",
    [(Fraction(5, 2), {2, 3}), (Fraction(2), {2}), (Fraction(-1, 2), {-1, 0}), (Fraction(7, 3), {2, 3})],
)
def test_round_admissible(x, expected):
    assert round_admissible(x) == expected


def test_round_scaling_bound():
    assert round_scaling_bound(Fraction(0)) == 1
    assert round_scaling_bound(Fraction(5, 2)) == 3
    assert round_scaling_bound(Fraction(-1000)) == 11


def test_pivot_sets():
    M = [Fraction(1), Fraction(-2), Fraction(0), Fraction(3, 2)]
    assert pivot_admissible(M) == {0, 1, 3}
    assert pivot_soft_candidates(M) == {0, 1, 3}
    assert pivot_soft_candidates([Fraction(1, 4), Fraction(-2)]) == {1}


def test_trisection_round_bound():
    assert trisection_round_bound(0) == 4
    assert trisection_round_bound(-10) > trisection_round_bound(-5)


def test_matrix_rank_and_residual():
    A = [[1, 2], [2, 4]]
    assert matrix_rank(A) == 1
    assert matrix_rank([[1, 0], [0, 1]]) == 2
    assert matrix_rank([[0, 0], [0, 0]]) == 0
    assert residual_norm(A, [Fraction(1), Fraction(-1, 2)]) == 0
    assert residual_norm(A, [Fraction(1), Fraction(0)]) == 2
    assert midpoints([(Fraction(0), Fraction(1))]) == [Fraction(1, 2)]

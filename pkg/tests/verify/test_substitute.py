import pytest

from erc.errors import SortError
from erc.lang.ast import INTEGER, REAL
from erc.verify.formula import Sym, arith, free_symbols, num
from erc.verify.fparser import parse_formula, parse_term
from erc.verify.normalize import alpha_equivalent
from erc.verify.substitute import fresh_name, substitute, substitute_many

ENV = {"x": REAL, "y": REAL, "n": INTEGER, "i": INTEGER}


def f(text):
    return parse_formula(text, ENV)


def test_fresh_name():
    assert fresh_name("i", {"x"}) == "i"
    assert fresh_name("i", {"i", "i1"}) == "i2"


def test_free_occurrences_only():
    formula = f("n > 0 and (forall n: INTEGER. n >= 0 => x >= 0)")
    result = substitute(formula, "n", num(3))
    assert alpha_equivalent(result, f("3 > 0 and (forall n: INTEGER. n >= 0 => x >= 0)"))

    bound_only = f("forall n: INTEGER. n >= 0")
    assert substitute(bound_only, "n", num(3)) is bound_only


def test_binder_is_renamed_instead_of_capturing():
    formula = f("forall i: INTEGER. i > n")
    result = substitute(formula, "n", arith("+", Sym("i", INTEGER), num(1)))
    assert alpha_equivalent(result, f("forall j: INTEGER. j > i + 1"))
    assert free_symbols(result) == {"i": INTEGER}
    assert "i1" in str(result)


def test_nested_binders():
    formula = f("exists i: INTEGER. forall n: INTEGER. i + n > y")
    result = substitute(formula, "y", parse_term("x * 2", ENV))
    assert alpha_equivalent(result, f("exists i: INTEGER. forall n: INTEGER. i + n > x * 2"))

    captured = substitute(f("exists i: INTEGER. i > n"), "n", Sym("i", INTEGER))
    assert alpha_equivalent(captured, f("exists j: INTEGER. j > i"))


def test_simultaneous_substitution():
    swapped = substitute_many(f("x > y"), {"x": Sym("y", REAL), "y": Sym("x", REAL)})
    assert alpha_equivalent(swapped, f("y > x"))
    assert substitute_many(f("x > y"), {}) == f("x > y")


def test_sorts():
    widened = substitute(f("x > 0"), "x", Sym("n", INTEGER))
    assert free_symbols(widened) == {"n": INTEGER}
    with pytest.raises(SortError, match="cannot substitute"):
        substitute(f("n > 0"), "n", Sym("x", REAL))

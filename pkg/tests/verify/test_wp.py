import pytest

from erc.errors import MissingAnnotation
from erc.lang import prepare
from erc.lang.ast import INTEGER, REAL, Assign, Binary, Block, Choose, If, IntLit
from erc.verify.formula import Sym, arith, implies, num
from erc.verify.fparser import parse_formula
from erc.verify.normalize import alpha_equivalent
from erc.verify.sampler import sample_check
from erc.verify.translate import Translator
from erc.verify.wp import WpCalculus, function_obligations, wp_assign, wp_if_choose, wp_while_choose

ENV = {"x": REAL, "y": REAL, "n": INTEGER}

COUNTDOWN = """
//@ pre: n >= 0
//@ post: result = 0
INTEGER Down(INTEGER n) {
  INTEGER i := n;
  //@ invariant: i >= 0
  //@ variant: i
  WHILE i > 0 DO {
    i := i - 1;
  }
  RETURN i;
}
"""


def f(text):
    return parse_formula(text, ENV)


def test_wp_assign_substitutes():
    post = f("x > y")
    pre = wp_assign("x", arith("+", Sym("y", REAL), num(1, REAL)), post)
    assert alpha_equivalent(pre, f("y + 1 > y"))
    assert wp_assign("n", num(3), post) == post


def test_wp_if_choose_shape():
    wp = wp_if_choose(f("x > 0"), f("1 > x"), f("y > 0"), f("y > 1"))
    expected = f("(x > 0 or 1 > x) and (1 > x => y > 0) and (x > 0 => y > 1)")
    assert alpha_equivalent(wp, expected)


def test_wp_while_choose_shape():
    wp = wp_while_choose(f("y >= x"), f("x > 0"), f("1 > x"))
    assert alpha_equivalent(wp, f("y >= x and (x > 0 or 1 > x)"))


def test_countdown_obligations_are_valid():
    program = prepare(COUNTDOWN, "down.erc")
    obligations = function_obligations(program, program.function("Down"))
    assert [o.origin for o in obligations] == ["preservation", "bound", "exit", "defined", "top"]
    for obligation in obligations:
        report = sample_check(obligation.formula, samples=400, seed=2)
        assert report.ok, (obligation.origin, report.summary())


def test_loop_needs_variant():
    source = COUNTDOWN.replace("  //@ variant: i\n", "")
    program = prepare(source, "down.erc")
    with pytest.raises(MissingAnnotation, match="no variant"):
        function_obligations(program, program.function("Down"))


def test_real_variant_needs_epsilon():
    source = """
//@ post: result >= 0
INTEGER Halve(REAL x) {
  REAL y := x;
  //@ invariant: y >= 0
  //@ variant: y
  WHILE y > 1 DO {
    y := y / 2;
  }
  RETURN 0;
}
"""
    program = prepare(source, "halve.erc")
    with pytest.raises(MissingAnnotation, match="needs an epsilon"):
        function_obligations(program, program.function("Halve"))


def test_multivalued_assignment_expands_to_ifs():
    source = """
INTEGER Pick(REAL x) {
  INTEGER k;
  k := choose(0 > x, 1 > x, x > 0) + 1;
  RETURN k;
}
"""
    body = prepare(source, "pick.erc").function("Pick").body
    outer = body.stmts[1]
    assert isinstance(outer, If)
    assert isinstance(outer.test, Binary) and outer.test.op == "="
    assert isinstance(outer.test.left, Choose) and len(outer.test.left.args) == 3
    assert isinstance(outer.test.right, IntLit) and outer.test.right.value == 2
    assert isinstance(outer.then.stmts[0], Assign)
    assert outer.then.stmts[0].value.value == 3

    (inner,) = outer.otherwise.stmts
    assert isinstance(inner, If) and isinstance(inner.test, Choose)
    assert len(inner.test.args) == 2
    assert [b.stmts[0].value.value for b in (inner.then, inner.otherwise)] == [2, 1]
    assert isinstance(inner.otherwise, Block)


STRAIGHT = """
REAL Shift(REAL x) {
  REAL y := x;
  IF choose(1 > x, x > 0) THEN {
    y := y + y;
  } ELSE {
    y := y + 1;
  }
  INTEGER n := 1;
  y := y - x + iota(n);
  RETURN y;
}
"""


def straight_line():
    program = prepare(STRAIGHT, "shift.erc")
    function = program.function("Shift")
    calculus = WpCalculus(Translator(program, function), f("y > 0"))
    return calculus, function.body.stmts[:-1]


@pytest.mark.parametrize("cut", [0, 1, 2, 3, 4])
def test_wp_composes(cut):
    calculus, stmts = straight_line()
    post = f("y > x + iota(n)")
    whole = calculus.wp_seq(stmts, post)
    split = calculus.wp_seq(stmts[:cut], calculus.wp_seq(stmts[cut:], post))
    assert alpha_equivalent(whole, split)


def test_wp_is_monotone():
    calculus, stmts = straight_line()
    stronger, weaker = f("y > 3"), f("y > 2")
    claim = implies(calculus.wp_seq(stmts, stronger), calculus.wp_seq(stmts, weaker))
    report = sample_check(claim, samples=1000, seed=4)
    assert report.ok, report.summary()
    converse = implies(calculus.wp_seq(stmts, weaker), calculus.wp_seq(stmts, stronger))
    assert not sample_check(converse, samples=1000, seed=4).ok

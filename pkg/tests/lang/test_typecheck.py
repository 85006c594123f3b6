import pytest

from erc.corpus.functions import F_SIGNATURE
from erc.errors import SortError
from erc.lang import load_open_program
from erc.lang.ast import INTEGER, REAL, Assign, Binary, Choose, If, IntLit, Signature
from erc.lang.desugar import desugar_program
from erc.lang.parser import parse
from erc.lang.typecheck import typecheck


def check(source: str, externals=None):
    return typecheck(parse(source, "t.erc"), externals)


@pytest.mark.parametrize(
    "source, message",
    [
        ("INTEGER F(REAL x) { RETURN x; }", "expected INTEGER"),
        ("INTEGER F(REAL x, REAL y) { RETURN x = y; }", "not decidable"),
        ("INTEGER F(INTEGER a, INTEGER b) { RETURN a * b; }", "Presburger"),
        ("INTEGER F(INTEGER a) { RETURN a / 2; }", "not defined on INTEGER"),
        ("INTEGER F(INTEGER a, REAL x) { RETURN x > a; }", "cannot mix"),
        ("INTEGER F(INTEGER a) { RETURN b; }", "unknown variable"),
        ("INTEGER F(INTEGER a) { RETURN g(a); }", "unknown function"),
        ("INTEGER F(INTEGER a) { IF a > 0 THEN { RETURN 1; } }", "without RETURN"),
        ("INTEGER F(INTEGER a) { INTEGER a; RETURN a; }", "already declared"),
        ("INTEGER F(INTEGER n) { REAL[] v; RETURN n; }", "explicit dimensions"),
        ("INTEGER F(REAL[] M) { RETURN M[0, 1] > 0; }", "takes 1 index"),
    ],
)
def test_sort_errors(source, message):
    with pytest.raises(SortError, match=message) as info:
        check(source)
    assert info.value.exit_code == 3


def test_declarations_are_function_scoped():
    source = """
REAL F(REAL x) {
  IF choose(1 > x, x > 0) THEN {
    REAL y := x;
    RETURN y;
  } ELSE {
    REAL y := 0 - x;
    RETURN y;
  }
}
"""
    with pytest.raises(SortError, match="function-scoped") as info:
        check(source)
    assert info.value.span.line == 7
    hoisted = source.replace("    REAL y := x;", "    y := x;").replace("    REAL y := 0 - x;", "    y := 0 - x;")
    check(hoisted.replace("REAL F(REAL x) {\n", "REAL F(REAL x) {\n  REAL y;\n"))


def test_literals_take_context_sort():
    program = check("REAL F(INTEGER p, REAL x) { RETURN x + 1/2; }")
    value = program.function("F").body.stmts[0].value
    assert value.sort == REAL
    assert value.right.sort == REAL
    assert value.right.left.sort == REAL


def test_constant_factor_becomes_additions():
    program = check("INTEGER F(INTEGER a) { RETURN 3 * a; }")
    value = program.function("F").body.stmts[0].value
    assert isinstance(value, Binary) and value.op == "+"
    assert value.sort == INTEGER


def test_externals_are_callable():
    externals = {"f": Signature((REAL,), REAL)}
    program = check("REAL F(INTEGER p) { RETURN f(iota(p)); }", externals)
    assert program.function("F").body.stmts[0].value.sort == REAL
    with pytest.raises(SortError, match="expects 1 argument"):
        check("REAL F(INTEGER p) { RETURN f(1, 2); }", externals)


def test_real_function_calls_omit_precision():
    program = check(
        "REAL Half(INTEGER p, REAL x) { RETURN x / 2; }\n"
        "REAL Quarter(INTEGER p, REAL x) { RETURN Half(Half(x)); }\n"
    )
    assert program.function("Quarter").body.stmts[0].value.sort == REAL


def test_corpus_programs_check(load_corpus):
    for name, bound in [
        ("round.erc", ()),
        ("pivot.erc", ()),
        ("gauss.erc", ()),
        ("exp.erc", ()),
        ("trisection.erc", ("f",)),
        ("bisection.erc", ("f",)),
    ]:
        assert load_corpus(name, bound).functions


def test_binary_choose_assignment_expands_to_if():
    program = desugar_program(check("INTEGER F(REAL x) { INTEGER b; b := choose(x > 0, 1 > x); RETURN b; }"))
    expanded = program.function("F").body.stmts[1]
    assert isinstance(expanded, If)
    assert isinstance(expanded.test, Choose)
    then, otherwise = expanded.then.stmts[0], expanded.otherwise.stmts[0]
    assert isinstance(then, Assign) and then.value == IntLit(1, sort=INTEGER)
    assert isinstance(otherwise, Assign) and otherwise.value == IntLit(0, sort=INTEGER)


def test_ternary_choose_assignment_nests(load_corpus):
    program = load_corpus("round.erc")
    digit_loop = program.function("Round").body.stmts[-2]
    expanded = digit_loop.body.stmts[1]
    assert isinstance(expanded, If)
    # IF choose(g0, g1, g2) = 2 THEN b := 1 ELSE IF choose(g0, g1) THEN b := 0 ELSE b := -1
    assert isinstance(expanded.test, Binary) and expanded.test.op == "="
    assert len(expanded.test.left.args) == 3
    assert expanded.then.stmts[0].value.value == 1
    inner = expanded.otherwise.stmts[0]
    assert isinstance(inner.test, Choose) and len(inner.test.args) == 2
    assert inner.then.stmts[0].value.value == 0
    assert inner.otherwise.stmts[0].value.value == -1


def test_load_open_program_declares_called_names(corpus_dir):
    program, externals = load_open_program(corpus_dir / "bisection.erc", F_SIGNATURE)
    assert externals == {"f": F_SIGNATURE}
    assert program.names == ("Bisection",)
    _, closed = load_open_program(corpus_dir / "round.erc", F_SIGNATURE)
    assert closed == {}

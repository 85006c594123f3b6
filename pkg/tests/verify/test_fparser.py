from fractions import Fraction

import pytest

from erc.errors import ErcSyntaxError, SortError
from erc.lang.ast import INTEGER, REAL
from erc.verify.fparser import format_vc_text, parse_formula, parse_term, parse_vc_text
from erc.verify.normalize import alpha_equivalent
from erc.verify.sampler import holds_in_state

ENV = {"x": REAL, "y": REAL, "i": INTEGER, "p": INTEGER, "M": "REAL[]", "f": "REAL->REAL"}


def holds(text: str, values, arrays=None, functions=None):
    return holds_in_state(parse_formula(text, ENV), values, arrays, functions)


def test_chained_comparison():
    assert holds("0 <= x < y <= 1", {"x": Fraction(1, 4), "y": Fraction(1, 2)})
    assert not holds("0 <= x < y <= 1", {"x": Fraction(1, 2), "y": Fraction(1, 4)})
    assert not holds("0 <= x < y <= 1", {"x": Fraction(1, 2), "y": 2})


def test_connectives_and_precedence():
    values = {"x": 1, "y": -1}
    assert holds("x > 0 and y > 0 or x > y", values)
    assert not holds("not x > 0 or y > 0", values)
    assert holds("x > 2 => y > 0", values)
    assert holds("x != y", values)


def test_abs_and_iota():
    assert holds("|y - x| <= iota(p)", {"x": 0, "y": Fraction(-1, 4), "p": -2})
    assert not holds("|y - x| <= iota(p)", {"x": 0, "y": Fraction(-1, 4), "p": -3})


def test_integer_quantifiers_and_arrays():
    arrays = {"M": ([0, 0, 2], (3,))}
    assert holds("exists i: INTEGER. 0 <= i < 3 and M[i] != 0", {}, arrays)
    assert not holds("forall i: INTEGER. 0 <= i < 3 => M[i] != 0", {}, arrays)


def test_exists_unique():
    assert holds("exists! i: INTEGER. 0 <= i < 1", {})
    assert not holds("exists! i: INTEGER. 0 <= i < 2", {})


def test_substitution_suffix():
    assert holds("(x > y)[0/x]", {"y": -1})
    assert holds("(x > y)[y + 1/x, 2/y]", {"y": -1, "x": 0}) is False


def test_ite_term():
    term = parse_term("ite(x >= y, x, y)", ENV)
    assert term.sort == REAL


@pytest.mark.parametrize("text", ["x >", "x > 0 and", "(x > 0", "x >> 0"])
def test_malformed(text):
    with pytest.raises(ErcSyntaxError):
        parse_formula(text, ENV)


@pytest.mark.parametrize("text", ["z > 0", "uniq(x, 0, 1)", "M > 0", "g(x) > 0"])
def test_ill_sorted(text):
    with pytest.raises(SortError):
        parse_formula(text, ENV)


def test_parse_golden(corpus_dir):
    path = corpus_dir / "goldens" / "trisection" / "vc_3.vc"
    vc = parse_vc_text(path.read_text(encoding="utf-8"), path.stem)
    assert vc.name == "vc_3"
    assert vc.env["p"] == INTEGER and vc.env["x"] == REAL
    assert {"I", "V", "eps", "at", "ct"} <= set(vc.defines)


@pytest.mark.parametrize(
    "text, message",
    [
        ("var x: REAL\n", "missing 'vc:'"),
        ("var x: REAL\nvc: x > 0\nvc: x > 1\n", "exactly one"),
        ("let x := 1\nvc: true\n", "expected var"),
        ("var x: COMPLEX\nvc: true\n", "unknown sort"),
        ("fun f: REAL\nvc: true\n", "fun f: REAL -> REAL"),
    ],
)
def test_vc_text_errors(text, message):
    with pytest.raises(ErcSyntaxError, match=message):
        parse_vc_text(text, "bad.vc")


def test_continuation_lines():
    vc = parse_vc_text("var x, y: REAL\nvc: x > 0 =>\n  x + y > y\n", "cont.vc")
    assert holds_in_state(vc.formula, {"x": 1, "y": 5})


def test_format_vc_text_reparses():
    formula = parse_formula("x >= 0 => forall i: INTEGER. 0 <= i < 3 => |M[i]| <= x + iota(p)", ENV)
    text = format_vc_text(formula, "comment line")
    assert text.startswith("// comment line\n")
    assert alpha_equivalent(parse_vc_text(text).formula, formula)

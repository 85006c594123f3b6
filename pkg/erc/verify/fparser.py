"""Parser for the assertion surface syntax and the ``.vc`` file format.

Assertions appear in ``//@`` annotations and in ``.vc`` files::

    0 <= x < y <= 1 and uniq(f, x, y) and cont(f)
    forall j: INTEGER. 0 <= j < i => |M[j]| < x
    (I and (at or ct))[0/x, 1/y]

A ``.vc`` file declares its symbols, may define macros and ends with the
obligation::

    var x, y: REAL
    fun f: REAL -> REAL
    define I := 0 <= x < y <= 1
    vc: I => x < 1
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from erc.errors import ErcSyntaxError, SortError, Span
from erc.lang.ast import INTEGER, REAL, array_sort, is_array_sort
from erc.verify.formula import (
    FALSE,
    TRUE,
    Formula,
    Node,
    Sym,
    Term,
    abs_term,
    apply_fn,
    arith,
    coerce,
    compare,
    conj,
    disj,
    exists,
    forall,
    free_symbols,
    function_result,
    function_sort,
    implies,
    is_function_sort,
    ite,
    negate,
    negation,
    num,
    pow2,
    pred,
    select,
    show,
    strip_forall,
    to_real,
)
from erc.verify.substitute import fresh_name, substitute, substitute_many

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
   |(?P<num>\d+(?:\.\d+)?)
   |(?P<ident>exists!|[A-Za-z_][A-Za-z_0-9]*)
   |(?P<op><=>|=>|>=|<=|!=|->|∃!|[><=+\-*/()\[\],.:|∧∨¬⇒⇔≤≥≠∀∃])
    """,
    re.VERBOSE,
)

_UNICODE = {
    "∧": "and",
    "∨": "or",
    "¬": "not",
    "⇒": "=>",
    "⇔": "<=>",
    "≤": "<=",
    "≥": ">=",
    "≠": "!=",
    "∀": "forall",
    "∃": "exists",
    "∃!": "exists!",
}

KEYWORDS = frozenset(
    {"and", "or", "not", "forall", "exists", "exists!", "true", "false", "iota", "ite", "to_real", "cont", "uniq"}
)
QUANTIFIERS = ("forall", "exists", "exists!")
COMPARISONS = (">", ">=", "<", "<=", "=", "!=")


@dataclass(frozen=True)
class FToken:
    kind: str
    text: str
    pos: int


def tokenize(text: str, origin: Span) -> List[FToken]:
    tokens: List[FToken] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ErcSyntaxError(
                f"unexpected character {text[pos]!r} in assertion",
                Span(origin.file, origin.line, origin.column + pos),
            )
        kind = match.lastgroup
        value = match.group()
        if kind != "ws":
            value = _UNICODE.get(value, value)
            if kind == "op" and value in KEYWORDS:
                kind = "ident"
            tokens.append(FToken(kind or "op", value, pos))
        pos = match.end()
    tokens.append(FToken("eof", "", len(text)))
    return tokens


class FormulaParser:
    """Precedence parser producing terms and formulas through the smart constructors."""

    def __init__(
        self,
        tokens: List[FToken],
        env: Mapping[str, str],
        defines: Optional[Mapping[str, Node]] = None,
        origin: Optional[Span] = None,
    ) -> None:
        self.tokens = tokens
        self.pos = 0
        self.env: Dict[str, str] = dict(env)
        self.defines: Dict[str, Node] = dict(defines or {})
        self.origin = origin or Span("<assertion>", 0, 0)

    # -- helpers ------------------------------------------------------------

    @property
    def current(self) -> FToken:
        return self.tokens[self.pos]

    def span(self, token: Optional[FToken] = None) -> Span:
        token = token or self.current
        return Span(self.origin.file, self.origin.line, self.origin.column + token.pos)

    def advance(self) -> FToken:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def check(self, text: str) -> bool:
        return self.current.kind in ("op", "ident") and self.current.text == text

    def accept(self, text: str) -> bool:
        if self.check(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> FToken:
        if not self.check(text):
            raise ErcSyntaxError(f"expected '{text}' but found '{self.current.text or 'end of text'}'", self.span())
        return self.advance()

    def expect_end(self) -> None:
        if self.current.kind != "eof":
            raise ErcSyntaxError(f"unexpected '{self.current.text}' after assertion", self.span())

    def as_term(self, node: Node, token: FToken) -> Term:
        if not isinstance(node, Term):
            raise ErcSyntaxError("expected a term but found a formula", self.span(token))
        return node

    def as_formula(self, node: Node, token: FToken) -> Formula:
        if not isinstance(node, Formula):
            raise ErcSyntaxError("expected a formula but found a term", self.span(token))
        return node

    # -- formulas -----------------------------------------------------------

    def formula(self) -> Formula:
        token = self.current
        return self.as_formula(self.node(), token)

    def term(self) -> Term:
        token = self.current
        return self.as_term(self.additive(), token)

    def node(self) -> Node:
        if self.current.text in QUANTIFIERS and self.current.kind == "ident":
            return self.quantified()
        token = self.current
        left = self.implication()
        if self.accept("<=>"):
            right = self.as_formula(self.implication(), self.current)
            left = self.as_formula(left, token)
            return conj(implies(left, right), implies(right, left))
        return left

    def implication(self) -> Node:
        token = self.current
        left = self.disjunction()
        if self.accept("=>"):
            rhs_token = self.current
            right = self.node() if self.current.text in QUANTIFIERS else self.implication()
            return implies(self.as_formula(left, token), self.as_formula(right, rhs_token))
        return left

    def disjunction(self) -> Node:
        token = self.current
        left = self.conjunction()
        if not self.check("or"):
            return left
        parts = [self.as_formula(left, token)]
        while self.accept("or"):
            token = self.current
            parts.append(self.as_formula(self.conjunction(), token))
        return disj(*parts)

    def conjunction(self) -> Node:
        token = self.current
        left = self.negation()
        if not self.check("and"):
            return left
        parts = [self.as_formula(left, token)]
        while self.accept("and"):
            token = self.current
            parts.append(self.as_formula(self.negation(), token))
        return conj(*parts)

    def negation(self) -> Node:
        if self.accept("not"):
            token = self.current
            return negation(self.as_formula(self.negation(), token))
        if self.current.text in QUANTIFIERS and self.current.kind == "ident":
            return self.quantified()
        return self.comparison()

    def quantified(self) -> Formula:
        kind = self.advance().text
        binders = self.binders()
        self.expect(".")
        saved = dict(self.env)
        self.env.update(binders)
        try:
            body = self.formula()
        finally:
            self.env = saved
        if kind == "forall":
            return forall(binders, body)
        if kind == "exists":
            return exists(binders, body)
        if len(binders) != 1:
            raise ErcSyntaxError("exists! binds exactly one variable", self.span())
        return exists_unique(binders[0][0], binders[0][1], body)

    def binders(self) -> List[Tuple[str, str]]:
        out: List[Tuple[str, str]] = []
        while True:
            names = [self.name()]
            while self.accept(","):
                names.append(self.name())
            self.expect(":")
            sort = self.sort()
            out.extend((n, sort) for n in names)
            if not self.accept(","):
                return out

    def name(self) -> str:
        token = self.current
        if token.kind != "ident" or token.text in KEYWORDS:
            raise ErcSyntaxError(f"expected a variable name but found '{token.text}'", self.span())
        return self.advance().text

    def sort(self) -> str:
        token = self.current
        if token.text not in (INTEGER, REAL):
            raise ErcSyntaxError(f"expected INTEGER or REAL but found '{token.text}'", self.span())
        self.advance()
        if self.accept("["):
            self.expect("]")
            return array_sort(token.text)
        return token.text

    def comparison(self) -> Node:
        token = self.current
        left = self.additive()
        if self.current.text not in COMPARISONS or self.current.kind != "op":
            return left
        operands = [self.as_term(left, token)]
        ops: List[str] = []
        while self.current.kind == "op" and self.current.text in COMPARISONS:
            ops.append(self.advance().text)
            token = self.current
            operands.append(self.as_term(self.additive(), token))
        return conj(*(compare(op, a, b) for op, a, b in zip(ops, operands, operands[1:])))

    # -- terms --------------------------------------------------------------

    def additive(self) -> Node:
        token = self.current
        left = self.multiplicative()
        while self.check("+") or self.check("-"):
            op = self.advance().text
            right_token = self.current
            right = self.as_term(self.multiplicative(), right_token)
            left = self._arith(op, self.as_term(left, token), right, token)
        return left

    def multiplicative(self) -> Node:
        token = self.current
        left = self.unary_minus()
        while self.check("*") or self.check("/"):
            op = self.advance().text
            right_token = self.current
            right = self.as_term(self.unary_minus(), right_token)
            left = self._arith(op, self.as_term(left, token), right, token)
        return left

    def _arith(self, op: str, left: Term, right: Term, token: FToken) -> Term:
        try:
            return arith(op, left, right)
        except SortError as exc:
            raise SortError(exc.message, self.span(token)) from None

    def unary_minus(self) -> Node:
        if self.accept("-"):
            token = self.current
            return negate(self.as_term(self.unary_minus(), token))
        return self.postfix()

    def postfix(self) -> Node:
        token = self.current
        node = self.primary()
        while self.check("["):
            if isinstance(node, Formula):
                node = substitute_many(node, self.substitution())
            else:
                self.advance()
                indices = [self.term()]
                while self.accept(","):
                    indices.append(self.term())
                self.expect("]")
                if not is_array_sort(node.sort):
                    raise SortError(f"cannot index a {node.sort} term", self.span(token))
                node = select(node, indices)
        return node

    def substitution(self) -> Dict[str, Term]:
        """``[t1/x1, t2/x2]``: each item splits at its last ``/`` before a bare name."""
        self.expect("[")
        mapping: Dict[str, Term] = {}
        while True:
            end = self._item_end()
            slash = end - 2
            if slash <= self.pos or self.tokens[slash].text != "/" or self.tokens[slash + 1].kind != "ident":
                raise ErcSyntaxError("substitution items have the form term/name", self.span())
            sub = FormulaParser(
                self.tokens[self.pos : slash] + [FToken("eof", "", self.tokens[slash].pos)],
                self.env,
                self.defines,
                self.origin,
            )
            value = sub.term()
            sub.expect_end()
            target = self.tokens[slash + 1].text
            if target not in self.env:
                raise SortError(f"unknown name '{target}' in substitution", self.span(self.tokens[slash + 1]))
            mapping[target] = value
            self.pos = end
            if self.accept("]"):
                return mapping
            self.expect(",")

    def _item_end(self) -> int:
        depth = 0
        i = self.pos
        while i < len(self.tokens):
            token = self.tokens[i]
            if token.kind == "eof":
                break
            if token.text in ("(", "["):
                depth += 1
            elif token.text in (")", "]"):
                if depth == 0:
                    return i
                depth -= 1
            elif token.text == "," and depth == 0:
                return i
            i += 1
        raise ErcSyntaxError("unterminated substitution", self.span())

    def primary(self) -> Node:
        token = self.current
        if token.kind == "num":
            self.advance()
            return num(Fraction(token.text))
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.accept("("):
            inner = self.node()
            self.expect(")")
            return inner
        if self.accept("|"):
            inner = self.term()
            self.expect("|")
            return abs_term(inner)
        if self.accept("iota"):
            return pow2(self._call_args(1)[0])
        if self.accept("to_real"):
            return to_real(self._call_args(1)[0])
        if self.accept("ite"):
            self.expect("(")
            cond = self.formula()
            self.expect(",")
            then = self.term()
            self.expect(",")
            otherwise = self.term()
            self.expect(")")
            return ite(cond, then, otherwise)
        if token.text in ("cont", "uniq") and token.kind == "ident":
            self.advance()
            try:
                return pred(token.text, self._call_args(None))
            except SortError as exc:
                raise SortError(exc.message, self.span(token)) from None
        if token.kind == "ident" and token.text not in KEYWORDS:
            return self.identifier()
        raise ErcSyntaxError(f"unexpected '{token.text or 'end of text'}' in assertion", self.span())

    def _call_args(self, count: Optional[int]) -> List[Term]:
        self.expect("(")
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(")")
        if count is not None and len(args) != count:
            raise ErcSyntaxError(f"expected {count} argument(s), got {len(args)}", self.span())
        return args

    def identifier(self) -> Node:
        token = self.advance()
        name = token.text
        if name in self.defines:
            return self.defines[name]
        sort = self.env.get(name)
        if sort is None:
            raise SortError(f"unknown name '{name}' in assertion", self.span(token))
        if is_function_sort(sort) and self.check("("):
            args = self._call_args(None)
            params = sort.split("->", 1)[0].split(",")
            if len(params) != len(args):
                raise SortError(f"{name} takes {len(params)} argument(s), got {len(args)}", self.span(token))
            return apply_fn(name, [coerce(a, s) for a, s in zip(args, params)], function_result(sort))
        return Sym(name, sort)


def exists_unique(name: str, sort: str, body: Formula) -> Formula:
    """``exists! x. B`` as ``exists x. B and forall x'. B[x'/x] => x' = x``."""
    other = fresh_name(name, set(free_symbols(body)) | {name})
    renamed = substitute(body, name, Sym(other, sort))
    unique = forall([(other, sort)], implies(renamed, compare("=", Sym(other, sort), Sym(name, sort))))
    return exists([(name, sort)], conj(body, unique))


def parse_formula(
    text: str,
    env: Mapping[str, str],
    defines: Optional[Mapping[str, Node]] = None,
    origin: Optional[Span] = None,
) -> Formula:
    """Parse an assertion.

    Args:
        text: Assertion text.
        env: Sorts of the names it may mention.
        defines: Macros usable by name.
        origin: Position of the text, for error messages.

    Raises:
        ErcSyntaxError: Malformed text.
        SortError: Unknown names or ill-sorted terms.
    """
    origin = origin or Span("<assertion>", 0, 0)
    parser = FormulaParser(tokenize(text, origin), env, defines, origin)
    result = parser.formula()
    parser.expect_end()
    return result


def parse_term(
    text: str,
    env: Mapping[str, str],
    defines: Optional[Mapping[str, Node]] = None,
    origin: Optional[Span] = None,
) -> Term:
    origin = origin or Span("<assertion>", 0, 0)
    parser = FormulaParser(tokenize(text, origin), env, defines, origin)
    result = parser.term()
    parser.expect_end()
    return result


# -- .vc files ---------------------------------------------------------------


@dataclass
class VcText:
    name: str
    formula: Formula
    env: Dict[str, str] = field(default_factory=dict)
    defines: Dict[str, Node] = field(default_factory=dict)


_DIRECTIVE = re.compile(r"^(var|fun|define|vc)\b\s*(.*)$", re.DOTALL)


def _directives(text: str, name: str) -> List[Tuple[int, str, str]]:
    found: List[Tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("//"):
            continue
        if raw[:1].isspace() and found:
            line, key, body = found[-1]
            found[-1] = (line, key, f"{body} {stripped}")
            continue
        match = _DIRECTIVE.match(stripped)
        if match is None:
            raise ErcSyntaxError(f"expected var, fun, define or vc but found '{stripped}'", Span(name, lineno, 1))
        found.append((lineno, match.group(1), match.group(2)))
    return found


def _parse_sort_text(text: str, span: Span) -> str:
    text = text.strip().replace(" ", "")
    base = text[:-2] if text.endswith("[]") else text
    if base not in (INTEGER, REAL):
        raise ErcSyntaxError(f"unknown sort '{text}'", span)
    return text


def parse_vc_text(text: str, name: str = "<vc>") -> VcText:
    """Parse a ``.vc`` file: declarations, macros and one ``vc:`` line."""
    env: Dict[str, str] = {}
    defines: Dict[str, Node] = {}
    formula: Optional[Formula] = None
    for lineno, key, body in _directives(text, name):
        span = Span(name, lineno, 1)
        if key == "var":
            names, _, sort = body.partition(":")
            sort = _parse_sort_text(sort, span)
            for var in (n.strip() for n in names.split(",")):
                if not var:
                    raise ErcSyntaxError("empty name in var declaration", span)
                env[var] = sort
        elif key == "fun":
            fname, _, signature = body.partition(":")
            params, arrow, result = signature.partition("->")
            if not arrow:
                raise ErcSyntaxError("function declarations have the form 'fun f: REAL -> REAL'", span)
            sorts = [_parse_sort_text(s, span) for s in params.split(",")]
            env[fname.strip()] = function_sort(sorts, _parse_sort_text(result, span))
        elif key == "define":
            macro, sep, rhs = body.partition(":=")
            if not sep:
                raise ErcSyntaxError("definitions have the form 'define NAME := ...'", span)
            parser = FormulaParser(tokenize(rhs, span), env, defines, span)
            defines[macro.strip()] = parser.node()
            parser.expect_end()
        else:
            if formula is not None:
                raise ErcSyntaxError("a .vc file holds exactly one vc line", span)
            formula = parse_formula(body.lstrip(":").strip(), env, defines, span)
    if formula is None:
        raise ErcSyntaxError("missing 'vc:' line", Span(name, 1, 1))
    logger.debug("parsed %s with %d definitions", name, len(defines))
    return VcText(name, formula, env, defines)


def format_vc_text(formula: Formula, comment: Optional[str] = None) -> str:
    """Render a closed or open formula as a ``.vc`` file."""
    _, matrix = strip_forall(formula)
    free = free_symbols(matrix)
    lines: List[str] = []
    if comment:
        lines.extend(f"// {line}" for line in comment.splitlines())
    by_sort: Dict[str, List[str]] = {}
    for symbol, sort in sorted(free.items()):
        if is_function_sort(sort):
            params, result = sort.split("->", 1)
            lines.append(f"fun {symbol}: {', '.join(params.split(','))} -> {result}")
        else:
            by_sort.setdefault(sort, []).append(symbol)
    for sort in sorted(by_sort):
        lines.append(f"var {', '.join(by_sort[sort])}: {sort}")
    lines.append(f"vc: {show(matrix)}")
    return "\n".join(lines) + "\n"

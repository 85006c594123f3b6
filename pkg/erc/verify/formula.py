"""Two-sorted assertion language: terms, formulas and their smart constructors.

Build nodes through the lower-case constructors, never the classes directly.
The constructors coerce INTEGER operands of mixed arithmetic with ``to_real``,
rewrite ``<``, ``<=`` and ``!=`` into ``>``, ``>=`` and ``=``, and lift
``|t|``, ``ite`` and reads from array stores out of atoms by case splitting.
A constructed formula therefore never contains an abs, an ite or a store
inside a comparison or predicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Optional, Sequence, Tuple, Union

from erc.errors import SortError
from erc.lang.ast import INTEGER, REAL, base_sort, is_array_sort

BOOL = "BOOL"


def function_sort(params: Sequence[str], result: str) -> str:
    return f"{','.join(params)}->{result}"


def is_function_sort(sort: str) -> bool:
    return "->" in sort


def function_result(sort: str) -> str:
    return sort.split("->", 1)[1]


# -- terms -------------------------------------------------------------------


class Term:
    sort: str


@dataclass(frozen=True)
class Num(Term):
    value: Fraction
    sort: str = INTEGER


@dataclass(frozen=True)
class Sym(Term):
    name: str
    sort: str


@dataclass(frozen=True)
class Neg(Term):
    arg: Term
    sort: str


@dataclass(frozen=True)
class Arith(Term):
    op: str
    left: Term
    right: Term
    sort: str


@dataclass(frozen=True)
class Pow2(Term):
    """The precision embedding ``iota(n) = 2^n``."""

    arg: Term
    sort: str = REAL


@dataclass(frozen=True)
class ToReal(Term):
    arg: Term
    sort: str = REAL


@dataclass(frozen=True)
class Apply(Term):
    name: str
    args: Tuple[Term, ...]
    sort: str


@dataclass(frozen=True)
class Select(Term):
    array: Term
    indices: Tuple[Term, ...]
    sort: str


@dataclass(frozen=True)
class Store(Term):
    array: Term
    indices: Tuple[Term, ...]
    value: Term
    sort: str


@dataclass(frozen=True)
class Ite(Term):
    cond: "Formula"
    then: Term
    otherwise: Term
    sort: str


@dataclass(frozen=True)
class AbsT(Term):
    arg: Term
    sort: str


# -- formulas ----------------------------------------------------------------


class Formula:
    pass


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


@dataclass(frozen=True)
class Cmp(Formula):
    """``op`` is one of ``>``, ``>=`` or ``=``."""

    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Pred(Formula):
    """``cont(f)`` or ``uniq(f, a, b)``."""

    name: str
    args: Tuple[Term, ...]


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Quant(Formula):
    kind: str
    vars: Tuple[Tuple[str, str], ...]
    body: Formula


Node = Union[Term, Formula]

TRUE = Truth(True)
FALSE = Truth(False)

PREDICATES = {"cont": 1, "uniq": 3}


# -- term constructors -------------------------------------------------------


def num(value: Union[int, Fraction], sort: str = INTEGER) -> Num:
    value = Fraction(value)
    if sort == INTEGER and value.denominator != 1:
        sort = REAL
    return Num(value, sort)


def sym(name: str, sort: str) -> Sym:
    return Sym(name, sort)


def _scalar(term: Term, what: str) -> None:
    if term.sort not in (INTEGER, REAL):
        raise SortError(f"{what} needs a scalar operand, got sort {term.sort}")


def coerce(term: Term, sort: str) -> Term:
    """``term`` as a value of ``sort``; only INTEGER to REAL is allowed."""
    if term.sort == sort:
        return term
    if term.sort == INTEGER and sort == REAL:
        if isinstance(term, Num):
            return Num(term.value, REAL)
        return ToReal(term)
    raise SortError(f"cannot use a {term.sort} term where {sort} is expected")


def negate(term: Term) -> Term:
    _scalar(term, "negation")
    if isinstance(term, Num):
        return Num(-term.value, term.sort)
    return Neg(term, term.sort)


def arith(op: str, left: Term, right: Term) -> Term:
    if op not in ("+", "-", "*", "/"):
        raise SortError(f"unknown arithmetic operator '{op}'")
    _scalar(left, f"'{op}'")
    _scalar(right, f"'{op}'")
    sort = REAL if op == "/" or REAL in (left.sort, right.sort) else INTEGER
    return Arith(op, coerce(left, sort), coerce(right, sort), sort)


def pow2(arg: Term) -> Pow2:
    if arg.sort != INTEGER:
        raise SortError(f"iota needs an INTEGER argument, got {arg.sort}")
    return Pow2(arg)


def to_real(term: Term) -> Term:
    return coerce(term, REAL)


def apply_fn(name: str, args: Sequence[Term], sort: str) -> Apply:
    return Apply(name, tuple(args), sort)


def select(array: Term, indices: Sequence[Term]) -> Term:
    """Array read; a read through a store becomes an ite on the indices."""
    if not is_array_sort(array.sort):
        raise SortError(f"cannot index a {array.sort} term")
    indices = tuple(coerce(i, INTEGER) for i in indices)
    if isinstance(array, Store) and len(array.indices) == len(indices):
        same = conj(*(compare("=", i, j) for i, j in zip(indices, array.indices)))
        return ite(same, array.value, select(array.array, indices))
    return Select(array, indices, base_sort(array.sort))


def store(array: Term, indices: Sequence[Term], value: Term) -> Store:
    if not is_array_sort(array.sort):
        raise SortError(f"cannot assign into a {array.sort} term")
    return Store(array, tuple(coerce(i, INTEGER) for i in indices), coerce(value, base_sort(array.sort)), array.sort)


def ite(cond: Formula, then: Term, otherwise: Term) -> Term:
    if isinstance(cond, Truth):
        return then if cond.value else otherwise
    sort = then.sort
    if then.sort != otherwise.sort:
        sort = REAL
        then, otherwise = coerce(then, REAL), coerce(otherwise, REAL)
    return Ite(cond, then, otherwise, sort)


def abs_term(term: Term) -> Term:
    _scalar(term, "|.|")
    if isinstance(term, Num):
        return Num(abs(term.value), term.sort)
    return AbsT(term, term.sort)


# -- formula constructors ----------------------------------------------------


_SWAPPED = {"<": ">", "<=": ">="}


def compare(op: str, left: Term, right: Term) -> Formula:
    """Atom ``left op right`` for op in ``> >= < <= = !=``."""
    if op == "!=":
        return disj(compare(">", left, right), compare(">", right, left))
    if op in _SWAPPED:
        op, left, right = _SWAPPED[op], right, left
    if op not in (">", ">=", "="):
        raise SortError(f"unknown comparison '{op}'")
    _scalar(left, f"'{op}'")
    _scalar(right, f"'{op}'")
    if left.sort != right.sort:
        left, right = coerce(left, REAL), coerce(right, REAL)
    if op != "=":
        # |t| below a bound is a two-sided bound, |t| above one is a disjunction
        if isinstance(right, AbsT) and not _liftable_in(left):
            inner = right.arg
            return conj(compare(op, left, inner), compare(op, inner, negate(left)))
        if isinstance(left, AbsT) and not _liftable_in(right):
            inner = left.arg
            return disj(compare(op, inner, right), compare(op, negate(inner), right))
    return _lifted(lambda terms: Cmp(op, terms[0], terms[1]), (left, right))


def pred(name: str, args: Sequence[Term]) -> Formula:
    arity = PREDICATES.get(name)
    if arity is None:
        raise SortError(f"unknown predicate '{name}'")
    if len(args) != arity:
        raise SortError(f"{name} takes {arity} argument(s), got {len(args)}")
    if not is_function_sort(args[0].sort):
        raise SortError(f"{name} needs a function symbol as first argument")
    rest = tuple(coerce(a, REAL) for a in args[1:])
    return _lifted(lambda terms: Pred(name, terms), (args[0],) + rest)


def negation(formula: Formula) -> Formula:
    if isinstance(formula, Truth):
        return Truth(not formula.value)
    if isinstance(formula, Not):
        return formula.arg
    if isinstance(formula, Cmp) and formula.op == ">":
        return Cmp(">=", formula.right, formula.left)
    if isinstance(formula, Cmp) and formula.op == ">=":
        return Cmp(">", formula.right, formula.left)
    return Not(formula)


def conj(*formulas: Formula) -> Formula:
    parts: list[Formula] = []
    for f in formulas:
        if isinstance(f, And):
            parts.extend(f.args)
        elif f == TRUE:
            continue
        elif f == FALSE:
            return FALSE
        else:
            parts.append(f)
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*formulas: Formula) -> Formula:
    parts: list[Formula] = []
    for f in formulas:
        if isinstance(f, Or):
            parts.extend(f.args)
        elif f == FALSE:
            continue
        elif f == TRUE:
            return TRUE
        else:
            parts.append(f)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def implies(left: Formula, right: Formula) -> Formula:
    if left == TRUE:
        return right
    return Implies(left, right)


def forall(variables: Sequence[Tuple[str, str]], body: Formula) -> Formula:
    return Quant("forall", tuple(variables), body) if variables else body


def exists(variables: Sequence[Tuple[str, str]], body: Formula) -> Formula:
    return Quant("exists", tuple(variables), body) if variables else body


def conjuncts(formula: Formula) -> Tuple[Formula, ...]:
    if isinstance(formula, And):
        return formula.args
    if formula == TRUE:
        return ()
    return (formula,)


# -- lifting -----------------------------------------------------------------


def _liftable(term: Term) -> bool:
    return isinstance(term, (Ite, AbsT))


def _liftable_in(term: Term) -> bool:
    return any(_liftable(t) for t in subterms(term))


def _first_liftable(terms: Sequence[Term]) -> Optional[Term]:
    for term in terms:
        for t in subterms(term):
            if _liftable(t):
                return t
    return None


def _lifted(build, terms: Tuple[Term, ...]) -> Formula:
    target = _first_liftable(terms)
    if target is None:
        return build(terms)
    if isinstance(target, AbsT):
        inner = target.arg
        target_ite = Ite(compare(">=", inner, num(0, inner.sort)), inner, negate(inner), inner.sort)
        terms = tuple(replace_term(t, target, target_ite) for t in terms)
        target = target_ite
    assert isinstance(target, Ite)
    then_terms = tuple(replace_term(t, target, target.then) for t in terms)
    else_terms = tuple(replace_term(t, target, target.otherwise) for t in terms)
    return disj(
        conj(target.cond, _lifted(build, then_terms)),
        conj(negation(target.cond), _lifted(build, else_terms)),
    )


def replace_term(term: Term, old: Term, new: Term) -> Term:
    """Structural replacement of ``old`` by ``new`` outside of ite conditions."""
    if term == old:
        return new
    if isinstance(term, Neg):
        return Neg(replace_term(term.arg, old, new), term.sort)
    if isinstance(term, Arith):
        return Arith(term.op, replace_term(term.left, old, new), replace_term(term.right, old, new), term.sort)
    if isinstance(term, Pow2):
        return Pow2(replace_term(term.arg, old, new))
    if isinstance(term, ToReal):
        return ToReal(replace_term(term.arg, old, new))
    if isinstance(term, Apply):
        return Apply(term.name, tuple(replace_term(a, old, new) for a in term.args), term.sort)
    if isinstance(term, Select):
        return Select(
            replace_term(term.array, old, new), tuple(replace_term(i, old, new) for i in term.indices), term.sort
        )
    if isinstance(term, Ite):
        return Ite(term.cond, replace_term(term.then, old, new), replace_term(term.otherwise, old, new), term.sort)
    if isinstance(term, AbsT):
        return AbsT(replace_term(term.arg, old, new), term.sort)
    return term


# -- traversal ---------------------------------------------------------------


def subterms(term: Term) -> Iterator[Term]:
    """Pre-order walk; does not enter ite conditions."""
    yield term
    if isinstance(term, (Neg, Pow2, ToReal, AbsT)):
        yield from subterms(term.arg)
    elif isinstance(term, Arith):
        yield from subterms(term.left)
        yield from subterms(term.right)
    elif isinstance(term, Apply):
        for a in term.args:
            yield from subterms(a)
    elif isinstance(term, Select):
        yield from subterms(term.array)
        for i in term.indices:
            yield from subterms(i)
    elif isinstance(term, Store):
        yield from subterms(term.array)
        for i in term.indices:
            yield from subterms(i)
        yield from subterms(term.value)
    elif isinstance(term, Ite):
        yield from subterms(term.then)
        yield from subterms(term.otherwise)


def is_quantifier_free(formula: Formula) -> bool:
    if isinstance(formula, Quant):
        return False
    if isinstance(formula, (And, Or)):
        return all(is_quantifier_free(a) for a in formula.args)
    if isinstance(formula, Not):
        return is_quantifier_free(formula.arg)
    if isinstance(formula, Implies):
        return is_quantifier_free(formula.left) and is_quantifier_free(formula.right)
    terms: Tuple[Term, ...] = ()
    if isinstance(formula, Cmp):
        terms = (formula.left, formula.right)
    elif isinstance(formula, Pred):
        terms = formula.args
    return all(
        is_quantifier_free(t.cond) for term in terms for t in subterms(term) if isinstance(t, Ite)
    )


def free_symbols(node: Node) -> Dict[str, str]:
    """Free names with their sorts, function symbols included."""
    found: Dict[str, str] = {}
    _collect(node, frozenset(), found)
    return found


def _collect(node: Node, bound: frozenset, found: Dict[str, str]) -> None:
    if isinstance(node, Sym):
        if node.name not in bound:
            found.setdefault(node.name, node.sort)
    elif isinstance(node, Apply):
        if node.name not in bound and node.name not in found:
            found[node.name] = function_sort([a.sort for a in node.args], node.sort)
        for a in node.args:
            _collect(a, bound, found)
    elif isinstance(node, Ite):
        _collect(node.cond, bound, found)
        _collect(node.then, bound, found)
        _collect(node.otherwise, bound, found)
    elif isinstance(node, Term):
        for child in _children(node):
            _collect(child, bound, found)
    elif isinstance(node, Cmp):
        _collect(node.left, bound, found)
        _collect(node.right, bound, found)
    elif isinstance(node, Pred):
        for a in node.args:
            _collect(a, bound, found)
    elif isinstance(node, Not):
        _collect(node.arg, bound, found)
    elif isinstance(node, (And, Or)):
        for a in node.args:
            _collect(a, bound, found)
    elif isinstance(node, Implies):
        _collect(node.left, bound, found)
        _collect(node.right, bound, found)
    elif isinstance(node, Quant):
        _collect(node.body, bound | {name for name, _ in node.vars}, found)


def _children(term: Term) -> Tuple[Term, ...]:
    if isinstance(term, (Neg, Pow2, ToReal, AbsT)):
        return (term.arg,)
    if isinstance(term, Arith):
        return (term.left, term.right)
    if isinstance(term, Select):
        return (term.array,) + term.indices
    if isinstance(term, Store):
        return (term.array,) + term.indices + (term.value,)
    return ()


def closure(formula: Formula) -> Formula:
    """Universal closure over free non-function symbols, sorted by name."""
    free = free_symbols(formula)
    variables = [(name, sort) for name, sort in sorted(free.items()) if not is_function_sort(sort)]
    return forall(variables, formula)


def strip_forall(formula: Formula) -> Tuple[Tuple[Tuple[str, str], ...], Formula]:
    variables: Tuple[Tuple[str, str], ...] = ()
    while isinstance(formula, Quant) and formula.kind == "forall":
        variables += formula.vars
        formula = formula.body
    return variables, formula


# -- printing ----------------------------------------------------------------


def show(node: Node) -> str:
    """Canonical text in the assertion surface syntax."""
    if isinstance(node, Term):
        return _show_term(node, 0)
    return _show_formula(node, 0)


def _show_num(value: Fraction) -> Tuple[str, int]:
    if value.denominator == 1:
        text = str(value.numerator)
    else:
        text = f"{value.numerator}/{value.denominator}"
    prec = 4 if value.denominator == 1 and value >= 0 else (2 if value >= 0 else 3)
    return text, prec


_TERM_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _show_term(term: Term, ctx: int) -> str:
    if isinstance(term, Num):
        text, prec = _show_num(term.value)
    elif isinstance(term, Sym):
        text, prec = term.name, 4
    elif isinstance(term, Neg):
        text, prec = "-" + _show_term(term.arg, 3), 3
    elif isinstance(term, Arith):
        prec = _TERM_PREC[term.op]
        text = f"{_show_term(term.left, prec)} {term.op} {_show_term(term.right, prec + 1)}"
    elif isinstance(term, Pow2):
        text, prec = f"iota({_show_term(term.arg, 0)})", 4
    elif isinstance(term, ToReal):
        return _show_term(term.arg, ctx)
    elif isinstance(term, Apply):
        text, prec = f"{term.name}({', '.join(_show_term(a, 0) for a in term.args)})", 4
    elif isinstance(term, Select):
        inner = ", ".join(_show_term(i, 0) for i in term.indices)
        text, prec = f"{_show_term(term.array, 4)}[{inner}]", 4
    elif isinstance(term, Store):
        inner = ", ".join(_show_term(i, 0) for i in term.indices)
        text, prec = f"store({_show_term(term.array, 0)}, [{inner}], {_show_term(term.value, 0)})", 4
    elif isinstance(term, Ite):
        text = f"ite({_show_formula(term.cond, 0)}, {_show_term(term.then, 0)}, {_show_term(term.otherwise, 0)})"
        prec = 4
    elif isinstance(term, AbsT):
        text, prec = f"|{_show_term(term.arg, 0)}|", 4
    else:
        raise TypeError(f"not a term: {term!r}")
    return f"({text})" if prec < ctx else text


def _show_formula(formula: Formula, ctx: int) -> str:
    if isinstance(formula, Truth):
        text, prec = ("true" if formula.value else "false"), 5
    elif isinstance(formula, Cmp):
        text, prec = f"{_show_term(formula.left, 0)} {formula.op} {_show_term(formula.right, 0)}", 5
    elif isinstance(formula, Pred):
        text, prec = f"{formula.name}({', '.join(_show_term(a, 0) for a in formula.args)})", 5
    elif isinstance(formula, Not):
        text, prec = "not " + _show_formula(formula.arg, 4), 4
    elif isinstance(formula, And):
        text, prec = " and ".join(_show_formula(a, 4) for a in formula.args), 3
    elif isinstance(formula, Or):
        text, prec = " or ".join(_show_formula(a, 3) for a in formula.args), 2
    elif isinstance(formula, Implies):
        text, prec = f"{_show_formula(formula.left, 2)} => {_show_formula(formula.right, 1)}", 1
    elif isinstance(formula, Quant):
        groups = ", ".join(f"{name}: {sort}" for name, sort in formula.vars)
        text, prec = f"{formula.kind} {groups}. {_show_formula(formula.body, 0)}", 0
    else:
        raise TypeError(f"not a formula: {formula!r}")
    return f"({text})" if prec < ctx else text

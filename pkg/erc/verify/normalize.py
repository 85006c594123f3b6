"""Canonical forms used to compare generated VCs with reference ones.

Two VCs count as the same obligation when their canonical texts agree: the
top universal closure is dropped, conclusions already among the hypotheses
are dropped, the rest goes to negation normal form with sorted connectives and
variables renamed in order of first occurrence.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterator, List, Optional

from erc.verify.formula import (
    AbsT,
    And,
    Apply,
    Arith,
    Cmp,
    Formula,
    Implies,
    Ite,
    Neg,
    Node,
    Not,
    Num,
    Or,
    Pow2,
    Pred,
    Quant,
    Select,
    Store,
    Sym,
    Term,
    ToReal,
    Truth,
    conj,
    conjuncts,
    disj,
    free_symbols,
    implies,
    is_function_sort,
    show,
    strip_forall,
)
from erc.verify.substitute import substitute_many

_NAME = re.compile(r"\b[A-Za-z_%][A-Za-z_0-9%]*\b(?!\s*\()")
_RESERVED = frozenset({"and", "or", "not", "forall", "exists", "true", "false", "INTEGER", "REAL"})
_PASSES = 3


def nnf(formula: Formula, positive: bool = True) -> Formula:
    """Negation normal form; implications are expanded, negated ``=`` splits in two."""
    if isinstance(formula, Truth):
        return Truth(formula.value == positive)
    if isinstance(formula, Cmp):
        if positive:
            return formula
        if formula.op == ">":
            return Cmp(">=", formula.right, formula.left)
        if formula.op == ">=":
            return Cmp(">", formula.right, formula.left)
        return disj(Cmp(">", formula.left, formula.right), Cmp(">", formula.right, formula.left))
    if isinstance(formula, Pred):
        return formula if positive else Not(formula)
    if isinstance(formula, Not):
        return nnf(formula.arg, not positive)
    if isinstance(formula, (And, Or)):
        parts = [nnf(a, positive) for a in formula.args]
        return conj(*parts) if isinstance(formula, And) == positive else disj(*parts)
    if isinstance(formula, Implies):
        if positive:
            return disj(nnf(formula.left, False), nnf(formula.right, True))
        return conj(nnf(formula.left, True), nnf(formula.right, False))
    if isinstance(formula, Quant):
        kind = formula.kind if positive else ("exists" if formula.kind == "forall" else "forall")
        return Quant(kind, formula.vars, nnf(formula.body, positive))
    raise TypeError(f"not a formula: {formula!r}")


def masked(node: Node) -> str:
    """Text with every variable name replaced by ``_``; function names stay."""
    return _NAME.sub(lambda m: m.group() if m.group() in _RESERVED else "_", show(node))


def sort_children(formula: Formula) -> Formula:
    if isinstance(formula, (And, Or)):
        parts = sorted((sort_children(a) for a in formula.args), key=lambda f: (masked(f), show(f)))
        return type(formula)(tuple(parts))
    if isinstance(formula, Quant):
        return Quant(formula.kind, formula.vars, sort_children(formula.body))
    return formula


def _symbols_in_order(node: Node, bound: frozenset) -> Iterator[str]:
    if isinstance(node, Sym):
        if node.name not in bound:
            yield node.name
    elif isinstance(node, (Neg, Pow2, ToReal, AbsT)):
        yield from _symbols_in_order(node.arg, bound)
    elif isinstance(node, Arith):
        yield from _symbols_in_order(node.left, bound)
        yield from _symbols_in_order(node.right, bound)
    elif isinstance(node, (Apply, Pred)):
        for a in node.args:
            yield from _symbols_in_order(a, bound)
    elif isinstance(node, Select):
        yield from _symbols_in_order(node.array, bound)
        for i in node.indices:
            yield from _symbols_in_order(i, bound)
    elif isinstance(node, Store):
        yield from _symbols_in_order(node.array, bound)
        for i in node.indices:
            yield from _symbols_in_order(i, bound)
        yield from _symbols_in_order(node.value, bound)
    elif isinstance(node, Ite):
        yield from _symbols_in_order(node.cond, bound)
        yield from _symbols_in_order(node.then, bound)
        yield from _symbols_in_order(node.otherwise, bound)
    elif isinstance(node, Cmp):
        yield from _symbols_in_order(node.left, bound)
        yield from _symbols_in_order(node.right, bound)
    elif isinstance(node, Not):
        yield from _symbols_in_order(node.arg, bound)
    elif isinstance(node, (And, Or)):
        for a in node.args:
            yield from _symbols_in_order(a, bound)
    elif isinstance(node, Implies):
        yield from _symbols_in_order(node.left, bound)
        yield from _symbols_in_order(node.right, bound)
    elif isinstance(node, Quant):
        yield from _symbols_in_order(node.body, bound | {name for name, _ in node.vars})


def rename_variables(formula: Formula) -> Formula:
    """Free variables become ``%v0, %v1, ...`` and bound ones ``%b0, ...`` in order of appearance."""
    sorts = {name: sort for name, sort in free_symbols(formula).items() if not is_function_sort(sort)}
    mapping: Dict[str, Term] = {}
    for name in _symbols_in_order(formula, frozenset()):
        if name in sorts and name not in mapping:
            mapping[name] = Sym(f"%v{len(mapping)}", sorts[name])
    counter = [0]
    return _rename_bound(substitute_many(formula, mapping), counter)


def _rename_bound(formula: Formula, counter: List[int]) -> Formula:
    if isinstance(formula, Quant):
        mapping: Dict[str, Term] = {}
        variables = []
        for name, sort in formula.vars:
            new = f"%b{counter[0]}"
            counter[0] += 1
            mapping[name] = Sym(new, sort)
            variables.append((new, sort))
        return Quant(formula.kind, tuple(variables), _rename_bound(substitute_many(formula.body, mapping), counter))
    if isinstance(formula, (And, Or)):
        return type(formula)(tuple(_rename_bound(a, counter) for a in formula.args))
    if isinstance(formula, Not):
        return Not(_rename_bound(formula.arg, counter))
    return formula


def drop_repeated_conclusions(formula: Formula) -> Formula:
    if not isinstance(formula, Implies):
        return formula
    hypotheses = set(conjuncts(formula.left))
    kept = [c for c in conjuncts(formula.right) if c not in hypotheses]
    return implies(formula.left, conj(*kept))


def normalize(formula: Formula) -> Formula:
    """Canonical representative of ``formula`` up to the equivalences above."""
    _, matrix = strip_forall(formula)
    current = nnf(drop_repeated_conclusions(matrix))
    text: Optional[str] = None
    for _ in range(_PASSES):
        current = rename_variables(sort_children(current))
        if show(current) == text:
            break
        text = show(current)
    return current


def canonical_text(formula: Formula) -> str:
    return show(normalize(formula)).replace("%", "")


def alpha_equivalent(left: Formula, right: Formula) -> bool:
    return canonical_text(left) == canonical_text(right)


def linear_form(term: Term) -> Dict[str, Fraction]:
    """Coefficients of ``term`` over its non-linear atoms; the constant sits under ``""``."""
    out: Dict[str, Fraction] = {}
    _linear(term, Fraction(1), out)
    return {k: v for k, v in out.items() if v != 0}


def _constant(term: Term) -> Optional[Fraction]:
    form = linear_form(term)
    if set(form) <= {""}:
        return form.get("", Fraction(0))
    return None


def _linear(term: Term, scale: Fraction, out: Dict[str, Fraction]) -> None:
    if isinstance(term, Num):
        out[""] = out.get("", Fraction(0)) + scale * term.value
    elif isinstance(term, ToReal):
        _linear(term.arg, scale, out)
    elif isinstance(term, Neg):
        _linear(term.arg, -scale, out)
    elif isinstance(term, Arith) and term.op in "+-":
        _linear(term.left, scale, out)
        _linear(term.right, scale if term.op == "+" else -scale, out)
    elif isinstance(term, Arith) and term.op == "*" and _constant(term.left) is not None:
        _linear(term.right, scale * _constant(term.left), out)
    elif isinstance(term, Arith) and term.op == "*" and _constant(term.right) is not None:
        _linear(term.left, scale * _constant(term.right), out)
    elif isinstance(term, Arith) and term.op == "/" and _constant(term.right):
        _linear(term.left, scale / _constant(term.right), out)
    else:
        key = show(term)
        out[key] = out.get(key, Fraction(0)) + scale

"""Capture-avoiding substitution ``F[e/x]``.

Nodes are rebuilt through the smart constructors, so a substitution that puts
an ite or an array store into an atom is lifted right away.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from erc.errors import SortError
from erc.lang.ast import INTEGER, REAL
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
    abs_term,
    apply_fn,
    arith,
    coerce,
    compare,
    conj,
    disj,
    free_symbols,
    implies,
    ite,
    negate,
    negation,
    pow2,
    pred,
    select,
    store,
    to_real,
)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """``base`` itself, or ``base1``, ``base2``, ... whichever is free first."""
    taken = set(avoid)
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def substitute(node: Node, name: str, term: Term) -> Node:
    """Replace free occurrences of ``name`` by ``term``.

    Args:
        node: Term or formula.
        name: Variable to replace.
        term: Replacement; an INTEGER term may replace a REAL variable.

    Raises:
        SortError: If ``term`` cannot stand where ``name`` is used.
    """
    return substitute_many(node, {name: term})


def substitute_many(node: Node, mapping: Mapping[str, Term]) -> Node:
    """Simultaneous substitution of every name in ``mapping``."""
    if not mapping:
        return node
    if isinstance(node, Term):
        return _term(node, mapping)
    return _formula(node, mapping)


def _term(t: Term, m: Mapping[str, Term]) -> Term:
    if isinstance(t, Sym):
        if t.name not in m:
            return t
        replacement = m[t.name]
        if replacement.sort != t.sort and not (t.sort == REAL and replacement.sort == INTEGER):
            raise SortError(f"cannot substitute a {replacement.sort} term for {t.name}: {t.sort}")
        return coerce(replacement, t.sort)
    if isinstance(t, Num):
        return t
    if isinstance(t, Neg):
        return negate(_term(t.arg, m))
    if isinstance(t, Arith):
        return arith(t.op, _term(t.left, m), _term(t.right, m))
    if isinstance(t, Pow2):
        return pow2(_term(t.arg, m))
    if isinstance(t, ToReal):
        return to_real(_term(t.arg, m))
    if isinstance(t, Apply):
        return apply_fn(t.name, [_term(a, m) for a in t.args], t.sort)
    if isinstance(t, Select):
        return select(_term(t.array, m), [_term(i, m) for i in t.indices])
    if isinstance(t, Store):
        return store(_term(t.array, m), [_term(i, m) for i in t.indices], _term(t.value, m))
    if isinstance(t, Ite):
        return ite(_formula(t.cond, m), _term(t.then, m), _term(t.otherwise, m))
    if isinstance(t, AbsT):
        return abs_term(_term(t.arg, m))
    raise TypeError(f"not a term: {t!r}")


def _formula(f: Formula, m: Mapping[str, Term]) -> Formula:
    if isinstance(f, Truth):
        return f
    if isinstance(f, Cmp):
        return compare(f.op, _term(f.left, m), _term(f.right, m))
    if isinstance(f, Pred):
        return pred(f.name, [_term(a, m) for a in f.args])
    if isinstance(f, Not):
        return negation(_formula(f.arg, m))
    if isinstance(f, And):
        return conj(*(_formula(a, m) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_formula(a, m) for a in f.args))
    if isinstance(f, Implies):
        return implies(_formula(f.left, m), _formula(f.right, m))
    if isinstance(f, Quant):
        return _quant(f, m)
    raise TypeError(f"not a formula: {f!r}")


def _quant(f: Quant, m: Mapping[str, Term]) -> Formula:
    bound = {name for name, _ in f.vars}
    free_in_body = free_symbols(f.body)
    inner = {k: v for k, v in m.items() if k not in bound and k in free_in_body}
    if not inner:
        return f
    clash: set[str] = set()
    for value in inner.values():
        clash |= set(free_symbols(value))
    avoid = set(free_in_body) | clash | set(inner) | bound
    renames: dict[str, Term] = {}
    variables = []
    for name, sort in f.vars:
        if name in clash:
            new = fresh_name(name, avoid)
            avoid.add(new)
            renames[name] = Sym(new, sort)
            variables.append((new, sort))
        else:
            variables.append((name, sort))
    body = _formula(f.body, {**inner, **renames})
    return Quant(f.kind, tuple(variables), body)

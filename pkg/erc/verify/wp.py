"""Weakest preconditions for the nondeterministic WHILE language.

For ``IF choose(a, c)`` both tests may hold at once and either branch may run:

    wp = (a or c) and (c => wp(THEN)) and (a => wp(ELSE))

``WHILE choose(a, c)`` keeps looping while the chosen test is ``c``. Its
precondition is ``I and (a or c)``; the loop emits side obligations for
preservation with a strictly decreasing variant, for the variant bound, for
the exit and for definedness of the test.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from erc.errors import MissingAnnotation, SortError, Span
from erc.lang.ast import (
    INTEGER,
    Assign,
    Binary,
    Block,
    Choose,
    Decl,
    Expr,
    FunctionDef,
    If,
    IndexAssign,
    IntLit,
    Program,
    Return,
    Stmt,
    While,
    assigned_variables,
    is_array_sort,
)
from erc.verify.formula import (
    Formula,
    Sym,
    Term,
    arith,
    compare,
    conj,
    disj,
    free_symbols,
    implies,
    negation,
    num,
    store,
)
from erc.verify.substitute import fresh_name, substitute
from erc.verify.translate import RESULT, Translator

logger = logging.getLogger(__name__)

ORIGINS = ("preservation", "bound", "exit", "defined", "top")


@dataclass(frozen=True)
class Obligation:
    """A side condition produced by a loop, or the top-level condition."""

    origin: str
    formula: Formula
    span: Span

    @property
    def position(self) -> Tuple[int, int]:
        return (self.span.line, self.span.column)


def wp_assign(name: str, value: Term, post: Formula) -> Formula:
    return substitute(post, name, value)


def wp_if_choose(a: Formula, c: Formula, then_wp: Formula, else_wp: Formula) -> Formula:
    return conj(disj(a, c), implies(c, then_wp), implies(a, else_wp))


def wp_while_choose(invariant: Formula, a: Formula, c: Formula) -> Formula:
    return conj(invariant, disj(a, c))


@dataclass(frozen=True)
class LoopAnnotation:
    invariant: Formula
    variant: Term
    epsilon: Term
    span: Span


class WpCalculus:
    """Backward predicate transformer for one function.

    ``RETURN e`` ends the function, so its precondition is the postcondition
    with ``e`` for ``result`` whatever follows it.
    """

    def __init__(self, translator: Translator, post: Formula) -> None:
        self.translator = translator
        self.post = post
        self.obligations: List[Obligation] = []

    def wp(self, stmt: Stmt, post: Formula) -> Formula:
        if isinstance(stmt, Block):
            return self.wp_seq(stmt.stmts, post)
        if isinstance(stmt, Decl):
            if stmt.init is not None:
                return wp_assign(stmt.name, self.translator.term(stmt.init), post)
            if is_array_sort(stmt.type.sort):
                return post
            return wp_assign(stmt.name, num(0, stmt.type.sort), post)
        if isinstance(stmt, Assign):
            return wp_assign(stmt.target, self.translator.term(stmt.value), post)
        if isinstance(stmt, IndexAssign):
            array = Sym(stmt.target, self.translator.sorts[stmt.target])
            indices = [self.translator.term(i) for i in stmt.indices]
            return wp_assign(stmt.target, store(array, indices, self.translator.term(stmt.value)), post)
        if isinstance(stmt, Return):
            return wp_assign(RESULT, self.translator.term(stmt.value), self.post)
        if isinstance(stmt, If):
            return self.wp_if(stmt, post)
        if isinstance(stmt, While):
            return self.wp_while(stmt, post)
        raise SortError(f"no wp rule for {type(stmt).__name__}", stmt.span)

    def wp_seq(self, stmts: Sequence[Stmt], post: Formula) -> Formula:
        for stmt in reversed(stmts):
            post = self.wp(stmt, post)
        return post

    def wp_if(self, stmt: If, post: Formula) -> Formula:
        then_wp = self.wp(stmt.then, post)
        else_wp = self.wp(stmt.otherwise, post)
        choice = self.choice_tests(stmt.test)
        if choice is None:
            test = self.translator.guard(stmt.test)
            return conj(implies(test, then_wp), implies(negation(test), else_wp))
        a, c = choice
        return wp_if_choose(a, c, then_wp, else_wp)

    def choice_tests(self, test: Expr) -> Optional[Tuple[Formula, Formula]]:
        """``(a, c)`` for a choose test: ``c`` selects THEN, ``a`` is any other test."""
        if isinstance(test, Choose):
            if len(test.args) != 2:
                raise SortError("a choose used as a test takes exactly two guards", test.span)
            return self.translator.guard(test.args[0]), self.translator.guard(test.args[1])
        if (
            isinstance(test, Binary)
            and test.op == "="
            and isinstance(test.left, Choose)
            and isinstance(test.right, IntLit)
        ):
            guards = [self.translator.guard(g) for g in test.left.args]
            k = test.right.value
            if not 0 <= k < len(guards):
                raise SortError(f"choose has no branch {k}", test.span)
            return disj(*(g for i, g in enumerate(guards) if i != k)), guards[k]
        return None

    def loop_annotation(self, stmt: While) -> LoopAnnotation:
        invariant = stmt.annotation("invariant")
        variant = stmt.annotation("variant")
        if invariant is None:
            raise MissingAnnotation("loop has no invariant", stmt.span)
        if variant is None:
            raise MissingAnnotation("loop has no variant", stmt.span)
        v = self.translator.annotation_term(variant)
        epsilon = stmt.annotation("epsilon")
        if epsilon is not None:
            e = self.translator.annotation_term(epsilon)
            changing = set(assigned_variables(stmt.body)) & set(free_symbols(e))
            if changing:
                raise SortError(f"epsilon depends on loop variables {sorted(changing)}", epsilon.span)
        elif v.sort == INTEGER:
            e = num(1)
        else:
            raise MissingAnnotation("a REAL variant needs an epsilon annotation", variant.span)
        return LoopAnnotation(self.translator.formula(invariant), v, e, stmt.span)

    def wp_while(self, stmt: While, post: Formula) -> Formula:
        ann = self.loop_annotation(stmt)
        choice = self.choice_tests(stmt.test)
        if choice is None:
            guard = self.translator.guard(stmt.test)
            a, c = negation(guard), guard
        else:
            a, c = choice
        inv = ann.invariant
        taken = set(self.translator.sorts) | set(free_symbols(inv)) | set(free_symbols(post))
        z = Sym(fresh_name("z", taken), ann.variant.sort)
        decreased = compare("<=", ann.variant, arith("-", z, ann.epsilon))
        body_post = conj(disj(a, c), inv, decreased)
        entry = conj(inv, c, compare("=", ann.variant, z))
        self._emit("preservation", implies(entry, self.wp(stmt.body, body_post)), stmt.span)
        self._emit("bound", implies(conj(inv, compare("<=", ann.variant, num(0))), negation(c)), stmt.span)
        self._emit("exit", implies(conj(inv, a), post), stmt.span)
        self._emit("defined", implies(inv, disj(a, c)), stmt.span)
        return wp_while_choose(inv, a, c)

    def _emit(self, origin: str, formula: Formula, span: Span) -> None:
        self.obligations.append(Obligation(origin, formula, span))


def function_obligations(
    program: Program,
    function: FunctionDef,
    translator: Optional[Translator] = None,
) -> List[Obligation]:
    """Loop obligations in source order followed by ``pre => wp(body, post)``.

    Raises:
        MissingAnnotation: No postcondition, or a loop without invariant or variant.
    """
    translator = translator or Translator(program, function)
    post_ann = function.annotation("post")
    if post_ann is None:
        raise MissingAnnotation(f"function '{function.name}' has no postcondition", function.span)
    post = translator.formula(post_ann)
    pre_ann = function.annotation("pre")
    pre = translator.formula(pre_ann) if pre_ann is not None else None
    calculus = WpCalculus(translator, post)
    body = calculus.wp(function.body, post)
    top = implies(pre, body) if pre is not None else body
    loops = sorted(calculus.obligations, key=lambda o: o.position)
    logger.debug("%s: %d loop obligation(s)", function.name, len(loops))
    return loops + [Obligation("top", top, function.span)]

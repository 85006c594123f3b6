"""Program expressions as assertion terms and formulas.

INTEGER guards are 0/1 valued; a guard ``g`` stands for the formula ``g = 1``
unless it is a comparison, a conditional or a literal.
"""

from __future__ import annotations

import logging
from typing import Dict, Mapping, Optional

from erc.errors import SortError
from erc.lang.ast import (
    INTEGER,
    Annotation,
    Binary,
    Call,
    Choose,
    Cond,
    Decl,
    Expr,
    FunctionDef,
    Index,
    IntLit,
    Iota,
    Program,
    Signature,
    Unary,
    Var,
    walk_stmts,
)
from erc.verify.fparser import parse_formula, parse_term
from erc.verify.formula import (
    FALSE,
    TRUE,
    Formula,
    Sym,
    Term,
    apply_fn,
    arith,
    coerce,
    compare,
    conj,
    disj,
    free_symbols,
    function_sort,
    ite,
    negate,
    negation,
    num,
    pow2,
    select,
)
from erc.verify.substitute import substitute_many

logger = logging.getLogger(__name__)

RESULT = "result"


class Translator:
    """Sorts and translations for one function of a sort-checked program."""

    def __init__(
        self,
        program: Program,
        function: FunctionDef,
        externals: Optional[Mapping[str, Signature]] = None,
    ) -> None:
        self.program = program
        self.function = function
        self.externals: Dict[str, Signature] = dict(externals or {})
        self.sorts = self._sorts()
        self._denotes: Dict[str, Term] = {}

    def _sorts(self) -> Dict[str, str]:
        sorts = {name: function_sort(sig.params, sig.result) for name, sig in self.externals.items()}
        for param in self.function.params:
            sorts[param.name] = param.type.sort
        for stmt in walk_stmts(self.function.body):
            if isinstance(stmt, Decl):
                sorts[stmt.name] = stmt.type.sort
        if RESULT in sorts:
            raise SortError(f"'{RESULT}' is reserved in annotated functions", self.function.span)
        sorts[RESULT] = self.function.ret.sort
        return sorts

    # -- annotations ----------------------------------------------------------

    def formula(self, annotation: Annotation) -> Formula:
        return parse_formula(annotation.text, self.sorts, origin=annotation.span)

    def annotation_term(self, annotation: Annotation) -> Term:
        return parse_term(annotation.text, self.sorts, origin=annotation.span)

    # -- expressions ----------------------------------------------------------

    def term(self, expr: Expr) -> Term:
        if isinstance(expr, IntLit):
            return num(expr.value, expr.sort or INTEGER)
        if isinstance(expr, Var):
            return Sym(expr.name, self.sorts[expr.name])
        if isinstance(expr, Unary):
            return negate(self.term(expr.operand))
        if isinstance(expr, Binary):
            if expr.op in (">", "="):
                return ite(self.guard(expr), num(1), num(0))
            return arith(expr.op, self.term(expr.left), self.term(expr.right))
        if isinstance(expr, Iota):
            return pow2(self.term(expr.arg))
        if isinstance(expr, Cond):
            return ite(self.guard(expr.test), self.term(expr.then), self.term(expr.otherwise))
        if isinstance(expr, Index):
            return select(Sym(expr.name, self.sorts[expr.name]), [self.term(i) for i in expr.indices])
        if isinstance(expr, Call):
            return self.call(expr)
        if isinstance(expr, Choose):
            raise SortError("choose is only supported as the test of IF or WHILE", expr.span)
        raise SortError(f"cannot translate {type(expr).__name__}", expr.span)

    def guard(self, expr: Expr) -> Formula:
        """The formula under which the INTEGER guard ``expr`` evaluates to 1."""
        if isinstance(expr, Binary) and expr.op in (">", "="):
            return compare(expr.op, self.term(expr.left), self.term(expr.right))
        if isinstance(expr, Cond):
            test = self.guard(expr.test)
            return disj(conj(test, self.guard(expr.then)), conj(negation(test), self.guard(expr.otherwise)))
        if isinstance(expr, IntLit):
            if expr.value == 1:
                return TRUE
            if expr.value == 0:
                return FALSE
        if isinstance(expr, Choose):
            raise SortError("choose is only supported as the test of IF or WHILE", expr.span)
        return compare("=", self.term(expr), num(1))

    def call(self, expr: Call) -> Term:
        if expr.name in self.externals:
            signature = self.externals[expr.name]
            args = [coerce(self.term(a), s) for a, s in zip(expr.args, signature.params)]
            return apply_fn(expr.name, args, signature.result)
        callee = self.program.function(expr.name)
        args = [self.term(a) for a in expr.args]
        denotes = self.denotation(callee)
        if denotes is None:
            return apply_fn(expr.name, args, callee.ret.sort)
        params = callee.params[1:] if callee.is_real_scalar else callee.params
        return substitute_many(denotes, {p.name: a for p, a in zip(params, args)})

    def denotation(self, callee: FunctionDef) -> Optional[Term]:
        """The ``denotes`` term of a helper, over its non-precision parameters."""
        annotation = callee.annotation("denotes")
        if annotation is None:
            return None
        if callee.name not in self._denotes:
            env = {p.name: p.type.sort for p in callee.params}
            env.update({name: function_sort(sig.params, sig.result) for name, sig in self.externals.items()})
            term = parse_term(annotation.text, env, origin=annotation.span)
            if callee.precision_param is not None and callee.precision_param in free_symbols(term):
                raise SortError(
                    f"denotation of '{callee.name}' mentions its precision parameter",
                    annotation.span,
                )
            logger.debug("inlining %s as %s", callee.name, annotation.text)
            self._denotes[callee.name] = term
        return self._denotes[callee.name]

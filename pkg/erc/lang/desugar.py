"""Multivalued assignment expansion.

``x := E[choose(g0, ..., gn-1)]`` abbreviates a chain of IFs, one branch per
index:

    IF choose(g0, ..., gn-1) = n-1 THEN x := E[n-1]
    ELSE IF choose(g0, ..., gn-2) = n-2 THEN ...
    ELSE IF choose(g0, g1) THEN x := E[1] ELSE x := E[0]

The evaluator and the wp calculus only ever see the expanded form.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, List, Optional, Tuple

from erc.lang.ast import (
    INTEGER,
    Assign,
    Binary,
    Block,
    Call,
    Choose,
    Cond,
    Decl,
    Expr,
    FunctionDef,
    If,
    Index,
    IndexAssign,
    IntLit,
    Iota,
    Program,
    Stmt,
    Unary,
    While,
    walk_expr,
)


def first_choose(expr: Expr) -> Optional[Choose]:
    for node in walk_expr(expr):
        if isinstance(node, Choose):
            return node
    return None


def substitute_choose(expr: Expr, target: Choose, index: int) -> Expr:
    """Replace ``target`` by the literal ``index`` and fold literal arithmetic."""
    if expr is target:
        return IntLit(index, span=target.span, sort=INTEGER)
    if isinstance(expr, Unary):
        operand = substitute_choose(expr.operand, target, index)
        if isinstance(operand, IntLit) and expr.sort == INTEGER:
            return IntLit(-operand.value, span=expr.span, sort=INTEGER)
        return replace(expr, operand=operand)
    if isinstance(expr, Binary):
        left = substitute_choose(expr.left, target, index)
        right = substitute_choose(expr.right, target, index)
        if isinstance(left, IntLit) and isinstance(right, IntLit) and expr.sort == INTEGER:
            if expr.op == "+":
                return IntLit(left.value + right.value, span=expr.span, sort=INTEGER)
            if expr.op == "-":
                return IntLit(left.value - right.value, span=expr.span, sort=INTEGER)
        return replace(expr, left=left, right=right)
    if isinstance(expr, Iota):
        return replace(expr, arg=substitute_choose(expr.arg, target, index))
    if isinstance(expr, Choose):
        return replace(expr, args=tuple(substitute_choose(a, target, index) for a in expr.args))
    if isinstance(expr, Call):
        return replace(expr, args=tuple(substitute_choose(a, target, index) for a in expr.args))
    if isinstance(expr, Cond):
        return replace(
            expr,
            test=substitute_choose(expr.test, target, index),
            then=substitute_choose(expr.then, target, index),
            otherwise=substitute_choose(expr.otherwise, target, index),
        )
    if isinstance(expr, Index):
        return replace(expr, indices=tuple(substitute_choose(i, target, index) for i in expr.indices))
    return expr


def _expand(guards: Tuple[Expr, ...], make: Callable[[int], Stmt], site: Choose) -> Stmt:
    n = len(guards)
    span = site.span
    test = Choose(guards, span=span, sort=INTEGER)
    then = Block((desugar_choose_assign(make(n - 1)),), span=span)
    if n == 2:
        otherwise = Block((desugar_choose_assign(make(0)),), span=span)
        return If(test, then, otherwise, span=span)
    test = Binary("=", test, IntLit(n - 1, span=span, sort=INTEGER), span=span, sort=INTEGER)
    otherwise = Block((_expand(guards[:-1], make, site),), span=span)
    return If(test, then, otherwise, span=span)


def desugar_choose_assign(stmt: Stmt) -> Stmt:
    """Expand an assignment whose right side contains ``choose``; other statements pass through.

    Args:
        stmt: A sort-checked statement.

    Returns:
        The nested IF expansion, or ``stmt`` itself.
    """
    if isinstance(stmt, (Assign, IndexAssign)):
        site = first_choose(stmt.value)
        if site is None:
            return stmt
        return _expand(site.args, lambda i: replace(stmt, value=substitute_choose(stmt.value, site, i)), site)
    if isinstance(stmt, Decl) and stmt.init is not None:
        site = first_choose(stmt.init)
        if site is None:
            return stmt
        assign = Assign(stmt.name, stmt.init, span=stmt.span)
        return Block((replace(stmt, init=None), desugar_choose_assign(assign)), span=stmt.span)
    return stmt


def desugar_stmt(stmt: Stmt) -> Stmt:
    """Apply the expansion everywhere inside ``stmt``."""
    if isinstance(stmt, Block):
        stmts: List[Stmt] = [desugar_stmt(s) for s in stmt.stmts]
        return replace(stmt, stmts=tuple(stmts))
    if isinstance(stmt, If):
        return replace(stmt, then=desugar_stmt(stmt.then), otherwise=desugar_stmt(stmt.otherwise))
    if isinstance(stmt, While):
        return replace(stmt, body=desugar_stmt(stmt.body))
    return desugar_choose_assign(stmt)


def desugar_program(program: Program) -> Program:
    functions: List[FunctionDef] = [replace(fn, body=desugar_stmt(fn.body)) for fn in program.functions]
    return replace(program, functions=tuple(functions))

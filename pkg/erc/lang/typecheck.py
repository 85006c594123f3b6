"""Static sort checking.

Produces a rebuilt Program in which every expression carries its sort. Integer
literals take the sort their context demands. Integer products with a constant
factor are rewritten into additions here, once sorts are known, because
INTEGER arithmetic stays within Presburger arithmetic.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Dict, Mapping, Optional, Tuple, Union

from erc.errors import SortError, Span
from erc.lang.ast import (
    INTEGER,
    REAL,
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
    Return,
    Signature,
    Stmt,
    Type,
    Unary,
    Var,
    While,
    base_sort,
    is_array_sort,
)

logger = logging.getLogger(__name__)

# Largest constant factor accepted in an INTEGER product.
MAX_CONSTANT_FACTOR = 2**16

Callee = Union[FunctionDef, Signature]


def is_literal_only(expr: Expr) -> bool:
    """True for expressions built from integer literals alone, like ``1/2`` or ``-3``."""
    if isinstance(expr, IntLit):
        return True
    if isinstance(expr, Unary):
        return is_literal_only(expr.operand)
    if isinstance(expr, Binary) and expr.op in "+-*/":
        return is_literal_only(expr.left) and is_literal_only(expr.right)
    return False


def constant_value(expr: Expr) -> int:
    """Value of a literal-only INTEGER expression."""
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, Unary):
        return -constant_value(expr.operand)
    assert isinstance(expr, Binary)
    left, right = constant_value(expr.left), constant_value(expr.right)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    raise SortError("integer division is not available; use REAL arithmetic", expr.span)


def scale(factor: int, expr: Expr, span: Span) -> Expr:
    """``factor * expr`` as additions, by balanced doubling."""
    if factor < 0:
        return Binary("-", IntLit(0, span=span, sort=INTEGER), scale(-factor, expr, span), span=span, sort=INTEGER)
    if factor == 0:
        return IntLit(0, span=span, sort=INTEGER)
    if factor == 1:
        return expr
    half = scale(factor // 2, expr, span)
    doubled = Binary("+", half, half, span=span, sort=INTEGER)
    if factor % 2:
        return Binary("+", doubled, expr, span=span, sort=INTEGER)
    return doubled


class _Scope:
    def __init__(self, function: FunctionDef) -> None:
        self.function = function
        self.sorts: Dict[str, str] = {}
        self.ranks: Dict[str, Optional[int]] = {}

    def declare(self, name: str, type_: Type, span: Span) -> None:
        if name in self.sorts:
            raise SortError(
                f"'{name}' is already declared in function '{self.function.name}';"
                " declarations are function-scoped, even inside IF and WHILE blocks",
                span,
            )
        self.sorts[name] = type_.sort
        if type_.is_array:
            self.ranks[name] = len(type_.dims) or None

    def lookup(self, name: str, span: Span) -> str:
        try:
            return self.sorts[name]
        except KeyError:
            raise SortError(f"unknown variable '{name}'", span) from None


class TypeChecker:
    def __init__(self, program: Program, externals: Optional[Mapping[str, Signature]] = None) -> None:
        self.program = program
        self.externals = dict(externals or {})
        self.callees: Dict[str, Callee] = {}
        for fn in program.functions:
            if fn.name in self.callees:
                raise SortError(f"function '{fn.name}' is defined twice", fn.span)
            self.callees[fn.name] = fn
        for name, signature in self.externals.items():
            if name in self.callees:
                raise SortError(f"external '{name}' clashes with a program function")
            self.callees[name] = signature

    def check(self) -> Program:
        functions = tuple(self.function(fn) for fn in self.program.functions)
        return replace(self.program, functions=functions)

    # -- functions and statements -------------------------------------------

    def function(self, fn: FunctionDef) -> FunctionDef:
        scope = _Scope(fn)
        params = []
        for param in fn.params:
            type_ = self.type(param.type, scope, parameter=True)
            scope.declare(param.name, type_, param.span)
            params.append(replace(param, type=type_))
        ret = self.type(fn.ret, scope, parameter=True)
        body = self.block(fn.body, scope)
        if not _returns(body):
            raise SortError(f"function '{fn.name}' may finish without RETURN", fn.span)
        return replace(fn, params=tuple(params), ret=ret, body=body)

    def type(self, type_: Type, scope: _Scope, parameter: bool = False) -> Type:
        if type_.dims is None:
            return type_
        if not type_.dims and not parameter:
            raise SortError("local arrays need explicit dimensions", type_.span)
        dims = tuple(self.expect(d, scope, INTEGER) for d in type_.dims)
        return replace(type_, dims=dims)

    def block(self, block: Block, scope: _Scope) -> Block:
        return replace(block, stmts=tuple(self.statement(s, scope) for s in block.stmts))

    def statement(self, stmt: Stmt, scope: _Scope) -> Stmt:
        if isinstance(stmt, Decl):
            type_ = self.type(stmt.type, scope)
            init = None
            if stmt.init is not None:
                init = self.expect(stmt.init, scope, type_.sort)
            scope.declare(stmt.name, type_, stmt.span)
            return replace(stmt, type=type_, init=init)
        if isinstance(stmt, Assign):
            sort = scope.lookup(stmt.target, stmt.span)
            return replace(stmt, value=self.expect(stmt.value, scope, sort))
        if isinstance(stmt, IndexAssign):
            sort = scope.lookup(stmt.target, stmt.span)
            if not is_array_sort(sort):
                raise SortError(f"'{stmt.target}' is not an array", stmt.span)
            indices = self.indices(stmt.target, stmt.indices, scope, stmt.span)
            return replace(stmt, indices=indices, value=self.expect(stmt.value, scope, base_sort(sort)))
        if isinstance(stmt, Block):
            return self.block(stmt, scope)
        if isinstance(stmt, If):
            test = self.expect(stmt.test, scope, INTEGER, "IF guard")
            return replace(stmt, test=test, then=self.block(stmt.then, scope), otherwise=self.block(stmt.otherwise, scope))
        if isinstance(stmt, While):
            test = self.expect(stmt.test, scope, INTEGER, "WHILE guard")
            return replace(stmt, test=test, body=self.block(stmt.body, scope))
        if isinstance(stmt, Return):
            return replace(stmt, value=self.expect(stmt.value, scope, scope.function.ret.sort, "RETURN value"))
        raise SortError(f"unsupported statement {type(stmt).__name__}", stmt.span)

    def indices(self, name: str, indices: Tuple[Expr, ...], scope: _Scope, span: Span) -> Tuple[Expr, ...]:
        rank = scope.ranks.get(name)
        if len(indices) != (rank or 1):
            raise SortError(f"'{name}' takes {rank or 1} index(es), got {len(indices)}", span)
        return tuple(self.expect(i, scope, INTEGER, "array index") for i in indices)

    # -- expressions --------------------------------------------------------

    def expect(self, expr: Expr, scope: _Scope, sort: str, what: str = "expression") -> Expr:
        checked = self.infer(expr, scope, sort, allow_array=is_array_sort(sort))
        if checked.sort != sort:
            raise SortError(f"{what} has sort {checked.sort}, expected {sort}", expr.span)
        return checked

    def infer(self, expr: Expr, scope: _Scope, expected: Optional[str] = None, allow_array: bool = False) -> Expr:
        if isinstance(expr, IntLit):
            sort = expected if expected in (INTEGER, REAL) else INTEGER
            return replace(expr, sort=sort)
        if isinstance(expr, Var):
            sort = scope.lookup(expr.name, expr.span)
            if is_array_sort(sort) and not allow_array:
                raise SortError(f"array '{expr.name}' used where a scalar is expected", expr.span)
            return replace(expr, sort=sort)
        if isinstance(expr, Unary):
            operand = self.infer(expr.operand, scope, expected)
            return replace(expr, operand=operand, sort=operand.sort)
        if isinstance(expr, Binary):
            return self.binary(expr, scope, expected)
        if isinstance(expr, Iota):
            return replace(expr, arg=self.expect(expr.arg, scope, INTEGER, "iota argument"), sort=REAL)
        if isinstance(expr, Choose):
            args = tuple(self.expect(a, scope, INTEGER, "choose argument") for a in expr.args)
            return replace(expr, args=args, sort=INTEGER)
        if isinstance(expr, Cond):
            test = self.expect(expr.test, scope, INTEGER, "conditional test")
            then, otherwise = self.pair(expr.then, expr.otherwise, scope, expected)
            return replace(expr, test=test, then=then, otherwise=otherwise, sort=then.sort)
        if isinstance(expr, Call):
            return self.call(expr, scope, allow_array)
        if isinstance(expr, Index):
            sort = scope.lookup(expr.name, expr.span)
            if not is_array_sort(sort):
                raise SortError(f"'{expr.name}' is not an array", expr.span)
            indices = self.indices(expr.name, expr.indices, scope, expr.span)
            return replace(expr, indices=indices, sort=base_sort(sort))
        raise SortError(f"unsupported expression {type(expr).__name__}", expr.span)

    def pair(self, left: Expr, right: Expr, scope: _Scope, expected: Optional[str]) -> Tuple[Expr, Expr]:
        """Check two operands that must share a sort; literals follow the other side."""
        if is_literal_only(left) and not is_literal_only(right):
            r = self.infer(right, scope, expected)
            l = self.infer(left, scope, r.sort)
        else:
            l = self.infer(left, scope, expected)
            r = self.infer(right, scope, l.sort)
        if l.sort != r.sort:
            raise SortError(
                f"cannot mix {l.sort} and {r.sort} operands; embed integers with iota",
                left.span,
            )
        return l, r

    def binary(self, expr: Binary, scope: _Scope, expected: Optional[str]) -> Expr:
        if expr.op in (">", "="):
            left, right = self.pair(expr.left, expr.right, scope, None)
            if expr.op == "=" and left.sort == REAL:
                raise SortError("equality of REAL values is not decidable; compare with '>'", expr.span)
            return replace(expr, left=left, right=right, sort=INTEGER)
        left, right = self.pair(expr.left, expr.right, scope, expected)
        sort = left.sort
        if sort == INTEGER and expr.op == "/":
            raise SortError("'/' is not defined on INTEGER", expr.span)
        if sort == INTEGER and expr.op == "*":
            if is_literal_only(left):
                factor, other = constant_value(left), right
            elif is_literal_only(right):
                factor, other = constant_value(right), left
            else:
                raise SortError(
                    "INTEGER multiplication needs a constant factor (Presburger arithmetic)",
                    expr.span,
                )
            if abs(factor) > MAX_CONSTANT_FACTOR:
                raise SortError(f"constant factor {factor} exceeds {MAX_CONSTANT_FACTOR}", expr.span)
            return scale(factor, other, expr.span)
        return replace(expr, left=left, right=right, sort=sort)

    def call(self, expr: Call, scope: _Scope, allow_array: bool) -> Expr:
        callee = self.callees.get(expr.name)
        if callee is None:
            raise SortError(f"unknown function '{expr.name}'", expr.span)
        if isinstance(callee, Signature):
            param_sorts = callee.params
            result = callee.result
        else:
            params = callee.params[1:] if callee.is_real_scalar else callee.params
            param_sorts = tuple(p.type.sort for p in params)
            result = callee.ret.sort
        if len(expr.args) != len(param_sorts):
            raise SortError(
                f"'{expr.name}' expects {len(param_sorts)} argument(s), got {len(expr.args)}",
                expr.span,
            )
        args = tuple(self.expect(a, scope, s, f"argument of '{expr.name}'") for a, s in zip(expr.args, param_sorts))
        if is_array_sort(result) and not allow_array:
            raise SortError(f"array result of '{expr.name}' used where a scalar is expected", expr.span)
        return replace(expr, args=args, sort=result)


def _returns(stmt: Stmt) -> bool:
    if isinstance(stmt, Return):
        return True
    if isinstance(stmt, Block):
        return any(_returns(s) for s in stmt.stmts)
    if isinstance(stmt, If):
        return _returns(stmt.then) and _returns(stmt.otherwise)
    return False


def typecheck(program: Program, externals: Optional[Mapping[str, Signature]] = None) -> Program:
    """Sort-check ``program`` and return it with every expression sort-tagged.

    Args:
        program: Parsed program.
        externals: Harness-bound functions, name to Signature.

    Raises:
        SortError: Sort mixing, non-constant integer products, REAL equality,
            unknown names, arity mismatches or a missing RETURN.
    """
    checked = TypeChecker(program, externals).check()
    logger.debug("sort-checked %d function(s) in %s", len(checked.functions), program.source_name)
    return checked

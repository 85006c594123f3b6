"""Abstract syntax of the ERC language.

Nodes are frozen dataclasses. The checker returns a rebuilt tree in which every
expression carries its sort; spans never take part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

from erc.errors import Span

INTEGER = "INTEGER"
REAL = "REAL"
SORTS = (INTEGER, REAL)


def array_sort(base: str) -> str:
    return f"{base}[]"


def is_array_sort(sort: Optional[str]) -> bool:
    return bool(sort) and sort.endswith("[]")


def base_sort(sort: str) -> str:
    return sort[:-2] if is_array_sort(sort) else sort


@dataclass(frozen=True, kw_only=True)
class Node:
    span: Span = field(default_factory=Span, compare=False, repr=False)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True, kw_only=True)
class Expr(Node):
    sort: Optional[str] = None


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    """``op`` is one of + - * / > =; ``<`` and ``&&`` never reach the tree."""

    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Iota(Expr):
    arg: Expr


@dataclass(frozen=True)
class Choose(Expr):
    args: Tuple[Expr, ...]


@dataclass(frozen=True)
class Cond(Expr):
    test: Expr
    then: Expr
    otherwise: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: Tuple[Expr, ...]


@dataclass(frozen=True)
class Index(Expr):
    name: str
    indices: Tuple[Expr, ...]


# -- types and statements ----------------------------------------------------


@dataclass(frozen=True)
class Type(Node):
    """A sort, optionally with array dimensions.

    ``dims`` is None for scalars and an empty tuple for unsized array parameters.
    """

    base: str
    dims: Optional[Tuple[Expr, ...]] = None

    @property
    def is_array(self) -> bool:
        return self.dims is not None

    @property
    def sort(self) -> str:
        return array_sort(self.base) if self.is_array else self.base

    def __str__(self) -> str:
        if self.dims is None:
            return self.base
        return f"{self.base}[{', '.join('_' for _ in self.dims)}]"


@dataclass(frozen=True)
class Annotation(Node):
    key: str
    text: str


@dataclass(frozen=True, kw_only=True)
class Stmt(Node):
    pass


@dataclass(frozen=True)
class Decl(Stmt):
    type: Type
    name: str
    init: Optional[Expr] = None


@dataclass(frozen=True)
class Assign(Stmt):
    target: str
    value: Expr


@dataclass(frozen=True)
class IndexAssign(Stmt):
    target: str
    indices: Tuple[Expr, ...]
    value: Expr


@dataclass(frozen=True)
class Block(Stmt):
    stmts: Tuple[Stmt, ...] = ()


@dataclass(frozen=True)
class If(Stmt):
    test: Expr
    then: Block
    otherwise: Block = field(default_factory=Block)


@dataclass(frozen=True)
class While(Stmt):
    test: Expr
    body: Block
    annotations: Tuple[Annotation, ...] = ()

    def annotation(self, key: str) -> Optional[Annotation]:
        return find_annotation(self.annotations, key)


@dataclass(frozen=True)
class Return(Stmt):
    value: Expr


# -- functions and programs --------------------------------------------------


@dataclass(frozen=True)
class Param(Node):
    type: Type
    name: str


@dataclass(frozen=True)
class FunctionDef(Node):
    name: str
    ret: Type
    params: Tuple[Param, ...]
    body: Block
    annotations: Tuple[Annotation, ...] = ()

    @property
    def is_real_scalar(self) -> bool:
        """Scalar REAL functions take a leading precision parameter."""
        return self.ret.base == REAL and not self.ret.is_array

    @property
    def precision_param(self) -> Optional[str]:
        return self.params[0].name if self.is_real_scalar else None

    def annotation(self, key: str) -> Optional[Annotation]:
        return find_annotation(self.annotations, key)


@dataclass(frozen=True)
class Signature:
    """Sorts of an external function, e.g. ``f: REAL -> REAL``."""

    params: Tuple[str, ...]
    result: str


@dataclass(frozen=True)
class Program:
    functions: Tuple[FunctionDef, ...]
    source_name: str = "<input>"

    def function(self, name: str) -> FunctionDef:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(fn.name == name for fn in self.functions)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(fn.name for fn in self.functions)


def find_annotation(annotations: Tuple[Annotation, ...], key: str) -> Optional[Annotation]:
    """Combine every annotation with ``key``; repeated lines are conjoined."""
    found = [a for a in annotations if a.key == key]
    if not found:
        return None
    if len(found) == 1:
        return found[0]
    text = " and ".join(f"({a.text})" for a in found)
    return Annotation(key, text, span=found[0].span)


def walk_expr(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal of an expression."""
    yield expr
    if isinstance(expr, Unary):
        yield from walk_expr(expr.operand)
    elif isinstance(expr, Binary):
        yield from walk_expr(expr.left)
        yield from walk_expr(expr.right)
    elif isinstance(expr, Iota):
        yield from walk_expr(expr.arg)
    elif isinstance(expr, (Choose, Call)):
        for arg in expr.args:
            yield from walk_expr(arg)
    elif isinstance(expr, Cond):
        yield from walk_expr(expr.test)
        yield from walk_expr(expr.then)
        yield from walk_expr(expr.otherwise)
    elif isinstance(expr, Index):
        for index in expr.indices:
            yield from walk_expr(index)


def walk_stmts(stmt: Stmt) -> Iterator[Stmt]:
    yield stmt
    if isinstance(stmt, Block):
        for inner in stmt.stmts:
            yield from walk_stmts(inner)
    elif isinstance(stmt, If):
        yield from walk_stmts(stmt.then)
        yield from walk_stmts(stmt.otherwise)
    elif isinstance(stmt, While):
        yield from walk_stmts(stmt.body)


def assigned_variables(stmt: Stmt) -> Tuple[str, ...]:
    """Names written anywhere inside ``stmt``, in first-write order."""
    names: list[str] = []
    for inner in walk_stmts(stmt):
        name = None
        if isinstance(inner, (Assign, IndexAssign)):
            name = inner.target
        elif isinstance(inner, Decl):
            name = inner.name
        if name is not None and name not in names:
            names.append(name)
    return tuple(names)


def mentions(expr: Expr, name: str) -> bool:
    return any(isinstance(e, Var) and e.name == name for e in walk_expr(expr))


def statement_exprs(stmt: Stmt) -> Iterator[Expr]:
    """Expressions read directly by ``stmt``, not by nested statements."""
    if isinstance(stmt, Decl):
        yield from stmt.type.dims or ()
        if stmt.init is not None:
            yield stmt.init
    elif isinstance(stmt, Assign):
        yield stmt.value
    elif isinstance(stmt, IndexAssign):
        yield from stmt.indices
        yield stmt.value
    elif isinstance(stmt, (If, While)):
        yield stmt.test
    elif isinstance(stmt, Return):
        yield stmt.value


def external_names(program: Program) -> Tuple[str, ...]:
    """Called names the program does not define, in first-call order."""
    names: list[str] = []
    for fn in program.functions:
        for stmt in walk_stmts(fn.body):
            for top in statement_exprs(stmt):
                for expr in walk_expr(top):
                    if isinstance(expr, Call) and expr.name not in program and expr.name not in names:
                        names.append(expr.name)
    return tuple(names)

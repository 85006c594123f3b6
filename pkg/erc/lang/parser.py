"""Recursive-descent parser for the ERC language.

Sugar handled here: ``a < b`` becomes ``b > a``, ``a && b`` becomes
``a ? b : 0``, a missing ELSE becomes an empty block and ``ELSE IF`` chains
nest.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Tuple

from erc.errors import ErcSyntaxError, Span
from erc.lang.ast import (
    INTEGER,
    REAL,
    Annotation,
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
    Param,
    Program,
    Return,
    Stmt,
    Type,
    Unary,
    Var,
    While,
)
from erc.lang.lexer import Token, tokenize

logger = logging.getLogger(__name__)

FUNCTION_KEYS = ("pre", "post", "denotes")
LOOP_KEYS = ("invariant", "variant", "epsilon")


class Parser:
    def __init__(self, tokens: List[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "EOF":
            self.pos += 1
        return token

    def check(self, text: str) -> bool:
        return self.current.kind in ("OP", "KEYWORD") and self.current.text == text

    def accept(self, text: str) -> bool:
        if self.check(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.check(text):
            raise ErcSyntaxError(f"expected '{text}' but found '{self.current}'", self.current.span)
        return self.advance()

    def expect_ident(self) -> Token:
        if self.current.kind != "IDENT":
            raise ErcSyntaxError(f"expected a name but found '{self.current}'", self.current.span)
        return self.advance()

    def annotations(self, allowed: Tuple[str, ...]) -> Tuple[Annotation, ...]:
        found: List[Annotation] = []
        while self.current.kind == "ANNOT":
            token = self.advance()
            if token.text not in allowed:
                raise ErcSyntaxError(
                    f"annotation '{token.text}' is not allowed here (expected one of {', '.join(allowed)})",
                    token.span,
                )
            found.append(Annotation(token.text, token.value, span=token.span))
        return tuple(found)

    # -- program structure --------------------------------------------------

    def program(self, name: str) -> Program:
        functions: List[FunctionDef] = []
        while self.current.kind != "EOF":
            functions.append(self.function())
        if not functions:
            raise ErcSyntaxError("a program needs at least one function", self.current.span)
        return Program(tuple(functions), source_name=name)

    def function(self) -> FunctionDef:
        annotations = self.annotations(FUNCTION_KEYS)
        ret = self.type()
        name = self.expect_ident()
        self.expect("(")
        params: List[Param] = []
        if not self.check(")"):
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
        self.expect(")")
        if ret.base == REAL and not ret.is_array:
            if not params or params[0].type.base != INTEGER or params[0].type.is_array:
                raise ErcSyntaxError(
                    f"REAL function '{name.text}' lacks leading INTEGER precision parameter",
                    name.span,
                )
        body = self.block()
        return FunctionDef(name.text, ret, tuple(params), body, annotations, span=name.span)

    def type(self) -> Type:
        token = self.current
        if token.kind != "KEYWORD" or token.text not in (INTEGER, REAL):
            raise ErcSyntaxError(f"expected INTEGER or REAL but found '{token}'", token.span)
        self.advance()
        dims: Optional[Tuple[Expr, ...]] = None
        if self.accept("["):
            items: List[Expr] = []
            if not self.check("]"):
                items.append(self.expr())
                while self.accept(","):
                    items.append(self.expr())
            self.expect("]")
            dims = tuple(items)
        return Type(token.text, dims, span=token.span)

    def param(self) -> Param:
        type_ = self.type()
        name = self.expect_ident()
        return Param(type_, name.text, span=name.span)

    def block(self) -> Block:
        start = self.expect("{")
        stmts: List[Stmt] = []
        while not self.check("}"):
            if self.current.kind == "EOF":
                raise ErcSyntaxError("unterminated block", start.span)
            stmts.append(self.statement())
        self.expect("}")
        return Block(tuple(stmts), span=start.span)

    # -- statements ---------------------------------------------------------

    def statement(self) -> Stmt:
        token = self.current
        if token.kind == "ANNOT":
            annotations = self.annotations(LOOP_KEYS)
            if not self.check("WHILE"):
                raise ErcSyntaxError("loop annotations must precede a WHILE", token.span)
            return self.while_stmt(annotations)
        if self.check("WHILE"):
            return self.while_stmt(())
        if self.check("IF"):
            return self.if_stmt()
        if self.accept("RETURN"):
            value = self.expr()
            self.expect(";")
            return Return(value, span=token.span)
        if token.kind == "KEYWORD" and token.text in (INTEGER, REAL):
            type_ = self.type()
            name = self.expect_ident()
            init = self.expr() if self.accept(":=") else None
            self.expect(";")
            return Decl(type_, name.text, init, span=name.span)
        if token.kind == "IDENT":
            name = self.advance()
            if self.accept("["):
                indices = self.expr_list("]")
                self.expect(":=")
                value = self.expr()
                self.expect(";")
                return IndexAssign(name.text, indices, value, span=name.span)
            self.expect(":=")
            value = self.expr()
            self.expect(";")
            return Assign(name.text, value, span=name.span)
        raise ErcSyntaxError(f"unexpected '{token}' at start of statement", token.span)

    def while_stmt(self, annotations: Tuple[Annotation, ...]) -> While:
        start = self.expect("WHILE")
        test = self.expr()
        self.expect("DO")
        body = self.block()
        return While(test, body, annotations, span=start.span)

    def if_stmt(self) -> If:
        start = self.expect("IF")
        test = self.expr()
        self.expect("THEN")
        then = self.block()
        otherwise = Block(span=start.span)
        if self.accept("ELSE"):
            if self.check("IF"):
                nested = self.if_stmt()
                otherwise = Block((nested,), span=nested.span)
            else:
                otherwise = self.block()
        return If(test, then, otherwise, span=start.span)

    # -- expressions --------------------------------------------------------

    def expr_list(self, closer: str) -> Tuple[Expr, ...]:
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.expect(closer)
        return tuple(items)

    def expr(self) -> Expr:
        test = self.conjunction()
        if self.check("?"):
            token = self.advance()
            then = self.expr()
            self.expect(":")
            otherwise = self.expr()
            return Cond(test, then, otherwise, span=token.span)
        return test

    def conjunction(self) -> Expr:
        left = self.comparison()
        while self.check("&&"):
            token = self.advance()
            right = self.comparison()
            left = Cond(left, right, IntLit(0, span=token.span), span=token.span)
        return left

    def comparison(self) -> Expr:
        left = self.additive()
        token = self.current
        if self.accept(">") or self.accept("="):
            right = self.additive()
            return Binary(token.text, left, right, span=token.span)
        if self.accept("<"):
            right = self.additive()
            return Binary(">", right, left, span=token.span)
        return left

    def additive(self) -> Expr:
        left = self.multiplicative()
        while self.check("+") or self.check("-"):
            token = self.advance()
            left = Binary(token.text, left, self.multiplicative(), span=token.span)
        return left

    def multiplicative(self) -> Expr:
        left = self.unary()
        while self.check("*") or self.check("/"):
            token = self.advance()
            left = Binary(token.text, left, self.unary(), span=token.span)
        return left

    def unary(self) -> Expr:
        if self.check("-"):
            token = self.advance()
            return Unary("-", self.unary(), span=token.span)
        return self.primary()

    def primary(self) -> Expr:
        token = self.current
        if token.kind == "NAT":
            self.advance()
            return IntLit(int(token.text), span=token.span)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        if self.accept("iota"):
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Iota(arg, span=token.span)
        if self.accept("choose"):
            self.expect("(")
            args = self.expr_list(")")
            if len(args) < 2:
                raise ErcSyntaxError("choose needs at least two arguments", token.span)
            return Choose(args, span=token.span)
        if token.kind == "IDENT":
            self.advance()
            if self.accept("("):
                args: Tuple[Expr, ...] = ()
                if not self.accept(")"):
                    args = self.expr_list(")")
                return Call(token.text, args, span=token.span)
            if self.accept("["):
                return Index(token.text, self.expr_list("]"), span=token.span)
            return Var(token.text, span=token.span)
        raise ErcSyntaxError(f"unexpected '{token}' in expression", token.span)


def parse(source: str, name: str = "<input>") -> Program:
    """Parse ERC source text into an unchecked Program.

    Args:
        source: Program text.
        name: Source name recorded in spans and trace sites.

    Returns:
        The parsed Program.

    Raises:
        ErcSyntaxError: With line and column of the offending token.
    """
    program = Parser(tokenize(source, name)).program(name)
    logger.debug("parsed %s: %s", name, ", ".join(program.names))
    return program

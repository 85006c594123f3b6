"""Tokenizer for ``.erc`` sources."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

from erc.errors import ErcSyntaxError, Span

KEYWORDS = frozenset(
    {"INTEGER", "REAL", "IF", "THEN", "ELSE", "WHILE", "DO", "RETURN", "iota", "choose"}
)

# Longest operators first.
OPERATORS = (":=", "&&", "+", "-", "*", "/", ">", "<", "=", "?", ":", ",", ";", "(", ")", "[", "]", "{", "}")

_ANNOTATION_RE = re.compile(r"//@\s*([A-Za-z_]+)\s*:\s*(.*)$")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NAT_RE = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NAT, KEYWORD, OP, ANNOT, EOF
    text: str
    span: Span
    value: str = ""  # annotation body for ANNOT tokens

    def __str__(self) -> str:
        return self.text if self.kind != "EOF" else "end of input"


def read_source(path: Union[str, Path]) -> str:
    """Text of a source file.

    Raises:
        ErcSyntaxError: The file is not valid UTF-8; the span points at the first bad byte.
    """
    path = Path(path)
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        column = exc.start - (data.rfind(b"\n", 0, exc.start) + 1) + 1
        raise ErcSyntaxError(
            f"not valid UTF-8: byte 0x{data[exc.start]:02x} ({exc.reason})", Span(path.name, line, column)
        ) from None
    return text.replace("\r\n", "\n").replace("\r", "\n")


def tokenize(source: str, name: str = "<input>") -> List[Token]:
    tokens: List[Token] = []
    for lineno, line in enumerate(source.splitlines(), start=1):
        col = 0
        while col < len(line):
            ch = line[col]
            span = Span(name, lineno, col + 1)
            if ch.isspace():
                col += 1
                continue
            if line.startswith("//@", col):
                match = _ANNOTATION_RE.match(line, col)
                if not match:
                    raise ErcSyntaxError("malformed annotation, expected '//@ key: formula'", span)
                tokens.append(Token("ANNOT", match.group(1), span, match.group(2).strip()))
                break
            if line.startswith("//", col):
                break
            match = _IDENT_RE.match(line, col)
            if match:
                text = match.group(0)
                tokens.append(Token("KEYWORD" if text in KEYWORDS else "IDENT", text, span))
                col = match.end()
                continue
            match = _NAT_RE.match(line, col)
            if match:
                tokens.append(Token("NAT", match.group(0), span))
                col = match.end()
                continue
            for op in OPERATORS:
                if line.startswith(op, col):
                    tokens.append(Token("OP", op, span))
                    col += len(op)
                    break
            else:
                raise ErcSyntaxError(f"unexpected character {ch!r}", span)
    last = len(source.splitlines()) + 1
    tokens.append(Token("EOF", "", Span(name, last, 1)))
    return tokens

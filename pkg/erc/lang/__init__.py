"""The two-sorted ERC WHILE language: syntax, sort checking and evaluation."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

from erc.lang.ast import Program, Signature, external_names
from erc.lang.desugar import desugar_program
from erc.lang.lexer import read_source
from erc.lang.parser import parse
from erc.lang.typecheck import typecheck


def prepare(
    source: str,
    name: str = "<input>",
    externals: Optional[Mapping[str, Signature]] = None,
) -> Program:
    """Parse, sort-check and desugar ``source``; the form evaluation and wp expect."""
    return desugar_program(typecheck(parse(source, name), externals))


def load_program(path: Union[str, Path], externals: Optional[Mapping[str, Signature]] = None) -> Program:
    path = Path(path)
    return prepare(read_source(path), path.name, externals)


def load_open_program(path: Union[str, Path], signature: Signature) -> Tuple[Program, Dict[str, Signature]]:
    """Load ``path``, declaring each called name it does not define with ``signature``.

    Returns:
        The prepared program and the externals it was checked against.
    """
    path = Path(path)
    source = read_source(path)
    externals = {name: signature for name in external_names(parse(source, path.name))}
    return desugar_program(typecheck(parse(source, path.name), externals)), externals

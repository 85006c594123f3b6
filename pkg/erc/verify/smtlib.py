"""SMT-LIB v2 output through pysmt.

Each VC becomes a script that declares its symbols, asserts the axioms of the
built-in predicates and the negated obligation, and ends in ``check-sat``; an
``unsat`` answer proves the VC. Arrays are functions from indices to values,
``iota`` is an uninterpreted ``Int -> Real`` function fixed by its recursion.
"""

from __future__ import annotations

import json
import logging
from io import StringIO
from pathlib import Path
from typing import Dict, List, Sequence, Union

from pysmt.environment import get_env, pop_env, push_env
from pysmt.fnode import FNode
from pysmt.smtlib import commands as smtcmd
from pysmt.smtlib.script import SmtLibScript
from pysmt.typing import BOOL as SMT_BOOL
from pysmt.typing import INT as SMT_INT
from pysmt.typing import REAL as SMT_REAL
from pysmt.typing import FunctionType

from erc.errors import ErcError
from erc.lang.ast import INTEGER, REAL, base_sort, is_array_sort
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
    function_result,
    is_function_sort,
    strip_forall,
)
from erc.verify.fparser import format_vc_text
from erc.verify.vcgen import VC, VcSet

logger = logging.getLogger(__name__)

LOGIC = "UFNIRA"
IOTA = "iota"


def _smt_type(sort: str):
    if sort == INTEGER:
        return SMT_INT
    if sort == REAL:
        return SMT_REAL
    raise ErcError(f"no SMT type for sort {sort}")


class SmtEmitter:
    """Translates formulas into pysmt nodes of the current environment."""

    def __init__(self) -> None:
        self.mgr = get_env().formula_manager
        self.declared: Dict[str, FNode] = {}
        self.axioms: List[FNode] = []
        self._bound: List[Dict[str, FNode]] = []

    # -- symbols --------------------------------------------------------------

    def declare(self, name: str, smt_type) -> FNode:
        if name not in self.declared:
            self.declared[name] = self.mgr.Symbol(name, smt_type)
        return self.declared[name]

    def variable(self, name: str, sort: str) -> FNode:
        for scope in reversed(self._bound):
            if name in scope:
                return scope[name]
        return self.declare(name, _smt_type(sort))

    def function(self, name: str, params: Sequence[str], result: str) -> FNode:
        return self.declare(name, FunctionType(_smt_type(result), [_smt_type(p) for p in params]))

    def iota(self) -> FNode:
        if IOTA not in self.declared:
            fn = self.declare(IOTA, FunctionType(SMT_REAL, [SMT_INT]))
            m = self.mgr
            k = m.Symbol("iota_arg", SMT_INT)
            self.axioms.append(m.Equals(m.Function(fn, [m.Int(0)]), m.Real(1)))
            self.axioms.append(
                m.ForAll(
                    [k],
                    m.Equals(
                        m.Function(fn, [m.Plus(k, m.Int(1))]),
                        m.Times(m.Real(2), m.Function(fn, [k])),
                    ),
                )
            )
        return self.declared[IOTA]

    def uniq(self, f: str) -> FNode:
        name = f"uniq_{f}"
        if name not in self.declared:
            pred = self.declare(name, FunctionType(SMT_BOOL, [SMT_REAL, SMT_REAL]))
            fn = self.function(f, [REAL], REAL)
            m = self.mgr
            a, b, x, y = (m.Symbol(f"uniq_{f}_{v}", SMT_REAL) for v in "abxy")

            def root(v: FNode) -> FNode:
                return m.And(m.LE(a, v), m.LE(v, b), m.Equals(m.Function(fn, [v]), m.Real(0)))

            unique = m.Exists([x], m.And(root(x), m.ForAll([y], m.Implies(root(y), m.Equals(y, x)))))
            sign_change = m.LT(m.Times(m.Function(fn, [a]), m.Function(fn, [b])), m.Real(0))
            definition = m.And(m.LT(a, b), sign_change, unique)
            self.axioms.append(m.ForAll([a, b], m.Iff(m.Function(pred, [a, b]), definition)))
        return self.declared[name]

    # -- translation ----------------------------------------------------------

    def term(self, t: Term) -> FNode:
        m = self.mgr
        if isinstance(t, Num):
            if t.sort == INTEGER:
                return m.Int(int(t.value))
            return m.Real(t.value)
        if isinstance(t, Sym):
            if is_array_sort(t.sort) or is_function_sort(t.sort):
                raise ErcError(f"'{t.name}' of sort {t.sort} cannot be a first-order SMT value")
            return self.variable(t.name, t.sort)
        if isinstance(t, Neg):
            zero = m.Int(0) if t.sort == INTEGER else m.Real(0)
            return m.Minus(zero, self.term(t.arg))
        if isinstance(t, Arith):
            left, right = self.term(t.left), self.term(t.right)
            if t.op == "+":
                return m.Plus(left, right)
            if t.op == "-":
                return m.Minus(left, right)
            if t.op == "*":
                return m.Times(left, right)
            return m.Div(left, right)
        if isinstance(t, Pow2):
            return m.Function(self.iota(), [self.term(t.arg)])
        if isinstance(t, ToReal):
            return m.ToReal(self.term(t.arg))
        if isinstance(t, Apply):
            args = [self.term(a) for a in t.args]
            return m.Function(self.function(t.name, [a.sort for a in t.args], t.sort), args)
        if isinstance(t, Select):
            if not isinstance(t.array, Sym):
                raise ErcError("array stores must be lifted before SMT output")
            fn = self.function(t.array.name, [INTEGER] * len(t.indices), base_sort(t.array.sort))
            return m.Function(fn, [self.term(i) for i in t.indices])
        if isinstance(t, Ite):
            return m.Ite(self.formula(t.cond), self.term(t.then), self.term(t.otherwise))
        if isinstance(t, AbsT):
            inner = self.term(t.arg)
            zero = m.Int(0) if t.sort == INTEGER else m.Real(0)
            return m.Ite(m.GE(inner, zero), inner, m.Minus(zero, inner))
        if isinstance(t, Store):
            raise ErcError("array stores must be lifted before SMT output")
        raise ErcError(f"no SMT translation for {t!r}")

    def formula(self, f: Formula) -> FNode:
        m = self.mgr
        if isinstance(f, Truth):
            return m.Bool(f.value)
        if isinstance(f, Cmp):
            left, right = self.term(f.left), self.term(f.right)
            if f.op == ">":
                return m.GT(left, right)
            if f.op == ">=":
                return m.GE(left, right)
            return m.Equals(left, right)
        if isinstance(f, Pred):
            fn = f.args[0]
            if not isinstance(fn, Sym) or function_result(fn.sort) != REAL:
                raise ErcError(f"{f.name} needs a REAL -> REAL function symbol")
            if f.name == "cont":
                return self.declare(f"cont_{fn.name}", SMT_BOOL)
            return m.Function(self.uniq(fn.name), [self.term(a) for a in f.args[1:]])
        if isinstance(f, Not):
            return m.Not(self.formula(f.arg))
        if isinstance(f, And):
            return m.And([self.formula(a) for a in f.args])
        if isinstance(f, Or):
            return m.Or([self.formula(a) for a in f.args])
        if isinstance(f, Implies):
            return m.Implies(self.formula(f.left), self.formula(f.right))
        if isinstance(f, Quant):
            scope: Dict[str, FNode] = {}
            for name, sort in f.vars:
                scope[name] = m.Symbol(f"{name}_{len(self._bound)}", _smt_type(sort))
            self._bound.append(scope)
            try:
                body = self.formula(f.body)
            finally:
                self._bound.pop()
            build = m.ForAll if f.kind == "forall" else m.Exists
            return build(list(scope.values()), body)
        raise ErcError(f"no SMT translation for {f!r}")


def to_smtlib(formula: Formula, logic: str = LOGIC) -> str:
    """Script whose ``unsat`` answer proves the closed ``formula``."""
    push_env()
    try:
        emitter = SmtEmitter()
        variables, matrix = strip_forall(formula)
        for name, sort in variables:
            if not is_array_sort(sort):
                emitter.declare(name, _smt_type(sort))
        negated = emitter.mgr.Not(emitter.formula(matrix))
        script = SmtLibScript()
        script.add(smtcmd.SET_LOGIC, [logic])
        for name in sorted(emitter.declared):
            script.add(smtcmd.DECLARE_FUN, [emitter.declared[name]])
        for axiom in emitter.axioms:
            script.add(smtcmd.ASSERT, [axiom])
        script.add(smtcmd.ASSERT, [negated])
        script.add(smtcmd.CHECK_SAT, [])
        buffer = StringIO()
        script.serialize(buffer, daggify=False)
        return buffer.getvalue()
    finally:
        pop_env()


def emit_solver(vc: VC) -> str:
    return to_smtlib(vc.formula)


def write_vc_files(vcsets: Sequence[VcSet], out_dir: Union[str, Path]) -> List[Path]:
    """Write ``<function>_vc<k>.smt2`` and ``.vc`` per VC plus an ``index.json``.

    Returns:
        Paths of the SMT-LIB files, in VC order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    index = []
    for vcset in vcsets:
        for k, vc in enumerate(vcset.vcs):
            stem = f"{vcset.function}_vc{k}"
            smt_path = out_dir / f"{stem}.smt2"
            smt_path.write_text(emit_solver(vc), encoding="utf-8")
            comment = f"{vcset.function} {vc.name}: {vc.origin} obligation at {vc.span}"
            (out_dir / f"{stem}.vc").write_text(format_vc_text(vc.formula, comment), encoding="utf-8")
            index.append(
                {
                    "function": vcset.function,
                    "name": vc.name,
                    "file": smt_path.name,
                    "origin": vc.origin,
                    "span": str(vc.span),
                }
            )
            written.append(smt_path)
    (out_dir / "index.json").write_text(json.dumps(index, indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %d VC file(s) to %s", len(written), out_dir)
    return written

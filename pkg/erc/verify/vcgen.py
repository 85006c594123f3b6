"""Verification condition generation.

Obligations from the wp calculus are split into VCs at implications and at
conjunctions that contain implications, so that every VC reads
``hypotheses and guards => conclusion``. Trivial VCs are discharged on the
spot and reported separately; the rest are numbered ``vc_0, vc_1, ...``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from erc.errors import Span
from erc.lang.ast import FunctionDef, Program, Signature
from erc.verify.formula import (
    TRUE,
    And,
    Cmp,
    Formula,
    Implies,
    Term,
    closure,
    conj,
    conjuncts,
    implies,
    show,
)
from erc.verify.normalize import linear_form
from erc.verify.translate import Translator
from erc.verify.wp import function_obligations

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VC:
    name: str
    hypotheses: Tuple[Formula, ...]
    conclusion: Formula
    origin: str
    span: Span
    guards: Tuple[Formula, ...] = ()

    @property
    def body(self) -> Formula:
        return implies(conj(*self.hypotheses, *self.guards), self.conclusion)

    @property
    def formula(self) -> Formula:
        """The closed obligation: universal closure over its free variables."""
        return closure(self.body)

    def __str__(self) -> str:
        return f"{self.name} [{self.origin} @ {self.span}]: {show(self.body)}"


@dataclass
class VcSet:
    function: str
    vcs: List[VC] = field(default_factory=list)
    discharged: List[Tuple[VC, str]] = field(default_factory=list)
    program: Optional[Program] = None
    externals: Mapping[str, Signature] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.vcs)

    def __iter__(self):
        return iter(self.vcs)


def split(
    formula: Formula,
    origin: str,
    span: Span,
    hypotheses: Tuple[Formula, ...] = (),
    guards: Tuple[Formula, ...] = (),
) -> List[VC]:
    """Break ``formula`` into VCs; names are assigned later."""
    if isinstance(formula, Implies):
        if not hypotheses and not guards:
            return split(formula.right, origin, span, conjuncts(formula.left), ())
        return split(formula.right, origin, span, hypotheses, guards + conjuncts(formula.left))
    if isinstance(formula, And) and any(isinstance(a, Implies) for a in formula.args):
        out: List[VC] = []
        for part in formula.args:
            out.extend(split(part, origin, span, hypotheses, guards))
        return out
    return [VC("", hypotheses, formula, origin, span, guards)]


def discharge_reason(vc: VC) -> Optional[str]:
    """Why ``vc`` holds without further work, or None."""
    if vc.conclusion == TRUE:
        return "conclusion is true"
    if vc.conclusion in vc.hypotheses or vc.conclusion in vc.guards:
        return "conclusion is a hypothesis"
    if vc.origin == "defined":
        return "test defined on entry by the loop precondition and afterwards by preservation"
    if vc.origin == "bound" and _bound_is_syntactic(vc):
        return "continuation test is the variant being positive"
    return None


def _bound_is_syntactic(vc: VC) -> bool:
    """``I and V <= 0 => not (l > r)`` where ``l - r`` and ``V`` have the same linear form."""
    # V <= 0 is the last hypothesis, as 0 >= V; not (l > r) arrives as r >= l
    variant_atom = next(
        (h for h in reversed(vc.hypotheses) if isinstance(h, Cmp) and h.op == ">=" and not linear_form(h.left)),
        None,
    )
    conclusion = vc.conclusion
    if variant_atom is None or not (isinstance(conclusion, Cmp) and conclusion.op == ">="):
        return False
    return _difference(conclusion.right, conclusion.left) == linear_form(variant_atom.right)


def _difference(left: Term, right: Term) -> Dict[str, Fraction]:
    out = dict(linear_form(left))
    for key, value in linear_form(right).items():
        out[key] = out.get(key, Fraction(0)) - value
    return {k: v for k, v in out.items() if v != 0}


def generate_vcs(
    program: Program,
    function: FunctionDef,
    externals: Optional[Mapping[str, Signature]] = None,
) -> VcSet:
    """VCs of one annotated function, in emission order.

    Args:
        program: Sort-checked, desugared program.
        function: Function with a ``post`` annotation.
        externals: Signatures of harness-bound functions.

    Raises:
        MissingAnnotation: Missing postcondition, invariant, variant or epsilon.
        SortError: Unsupported shapes such as ``choose`` inside arithmetic.
    """
    translator = Translator(program, function, externals)
    vcset = VcSet(function.name, program=program, externals=dict(externals or {}))
    for obligation in function_obligations(program, function, translator):
        for vc in split(obligation.formula, obligation.origin, obligation.span):
            reason = discharge_reason(vc)
            if reason is not None:
                vcset.discharged.append((vc, reason))
                continue
            named = VC(f"vc_{len(vcset.vcs)}", vc.hypotheses, vc.conclusion, vc.origin, vc.span, vc.guards)
            vcset.vcs.append(named)
    logger.info(
        "%s: %d VC(s), %d discharged",
        function.name,
        len(vcset.vcs),
        len(vcset.discharged),
    )
    return vcset


def annotated_functions(program: Program) -> Sequence[FunctionDef]:
    return [fn for fn in program.functions if fn.annotation("post") is not None]


def generate_all(program: Program, externals: Optional[Mapping[str, Signature]] = None) -> List[VcSet]:
    return [generate_vcs(program, fn, externals) for fn in annotated_functions(program)]

"""Randomized falsification of VCs with exact rational arithmetic.

A VC ``H => C`` is checked on random assignments: reals on a grid of step
2^-8, integers in a small range, the function symbol ``f`` bound to one of the
test polynomials. Variables fixed by an equation among the hypotheses are
computed rather than drawn. Finding no counterexample proves nothing, but a
counterexample refutes the VC.

Mutants of a VC set model typical annotation mistakes; the sampler should
refute each of them.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from erc.errors import UnsupportedQuantifierShape
from erc.lang.ast import INTEGER, REAL, Block, If, Program, Stmt, While, base_sort, is_array_sort
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
    Sym,
    Term,
    ToReal,
    Truth,
    conjuncts,
    free_symbols,
    is_function_sort,
    negation,
    strip_forall,
)
from erc.verify.vcgen import VC, VcSet, generate_vcs

logger = logging.getLogger(__name__)

GRID = Fraction(1, 256)
REAL_RANGE = (Fraction(-4), Fraction(4))
INTEGER_RANGE = (-16, 16)
MAX_EXPONENT = 4096

Value = Fraction


class _Skip(Exception):
    """The sample cannot be evaluated (division by zero, huge power)."""


class _Unbound(Exception):
    pass


@dataclass
class SampleReport:
    name: str
    samples: int = 0
    vacuous: int = 0
    skipped: int = 0
    counterexample: Optional[Dict[str, str]] = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def summary(self) -> str:
        if self.counterexample is not None:
            shown = ", ".join(f"{k} = {v}" for k, v in self.counterexample.items())
            return f"{self.name}: counterexample {shown}"
        return (
            f"{self.name}: no counterexample in {self.samples} sample(s) "
            f"({self.vacuous} vacuous, {self.skipped} skipped)"
        )


class _LazyArray:
    def __init__(self, name: str, sort: str, rng: random.Random, draw: Callable[[str], Value]) -> None:
        self.name = name
        self.sort = base_sort(sort)
        self.entries: Dict[Tuple[int, ...], Value] = {}
        self._draw = draw

    def get(self, indices: Tuple[int, ...]) -> Value:
        if indices not in self.entries:
            self.entries[indices] = self._draw(self.sort)
        return self.entries[indices]


class _Assignment:
    """Values of one sample; bound variables shadow free ones."""

    def __init__(self, functions: Mapping[str, object]) -> None:
        self.values: Dict[str, Value] = {}
        self.arrays: Dict[str, _LazyArray] = {}
        self.functions = dict(functions)

    # -- terms ----------------------------------------------------------------

    def term(self, t: Term) -> Value:
        if isinstance(t, Num):
            return t.value
        if isinstance(t, Sym):
            if t.name not in self.values:
                raise _Unbound(t.name)
            return self.values[t.name]
        if isinstance(t, (ToReal,)):
            return self.term(t.arg)
        if isinstance(t, Neg):
            return -self.term(t.arg)
        if isinstance(t, AbsT):
            return abs(self.term(t.arg))
        if isinstance(t, Arith):
            left, right = self.term(t.left), self.term(t.right)
            if t.op == "+":
                return left + right
            if t.op == "-":
                return left - right
            if t.op == "*":
                return left * right
            if right == 0:
                raise _Skip("division by zero")
            return left / right
        if isinstance(t, Pow2):
            exponent = self.term(t.arg)
            if abs(exponent) > MAX_EXPONENT:
                raise _Skip("exponent out of range")
            return Fraction(2) ** int(exponent)
        if isinstance(t, Apply):
            if t.name not in self.functions or len(t.args) != 1:
                raise UnsupportedQuantifierShape(f"cannot sample function symbol '{t.name}'")
            return self.functions[t.name].at(self.term(t.args[0]))
        if isinstance(t, Select):
            if not isinstance(t.array, Sym) or t.array.name not in self.arrays:
                raise _Skip("array store")
            indices = tuple(int(self.term(i)) for i in t.indices)
            return self.arrays[t.array.name].get(indices)
        if isinstance(t, Ite):
            return self.term(t.then) if self.formula(t.cond) else self.term(t.otherwise)
        raise _Skip(f"cannot evaluate {type(t).__name__}")

    # -- formulas -------------------------------------------------------------

    def formula(self, f: Formula) -> bool:
        if isinstance(f, Truth):
            return f.value
        if isinstance(f, Cmp):
            left, right = self.term(f.left), self.term(f.right)
            if f.op == ">":
                return left > right
            if f.op == ">=":
                return left >= right
            return left == right
        if isinstance(f, Pred):
            return self.predicate(f)
        if isinstance(f, Not):
            return not self.formula(f.arg)
        if isinstance(f, And):
            return all(self.formula(a) for a in f.args)
        if isinstance(f, Or):
            return any(self.formula(a) for a in f.args)
        if isinstance(f, Implies):
            return not self.formula(f.left) or self.formula(f.right)
        if isinstance(f, Quant):
            return self.quantified(f)
        raise _Skip(f"cannot evaluate {type(f).__name__}")

    def predicate(self, f: Pred) -> bool:
        fn = f.args[0]
        if not isinstance(fn, Sym) or fn.name not in self.functions:
            raise UnsupportedQuantifierShape(f"cannot sample {f.name} of {fn!r}")
        if f.name == "cont":
            return True
        poly = self.functions[fn.name]
        a, b = self.term(f.args[1]), self.term(f.args[2])
        return a < b and poly.at(a) * poly.at(b) < 0 and poly.count_roots(a, b) == 1

    def quantified(self, f: Quant) -> bool:
        names = [name for name, _ in f.vars]
        saved = {name: self.values[name] for name in names if name in self.values}
        low, high = INTEGER_RANGE
        try:
            for combo in product(range(low, high + 1), repeat=len(names)):
                self.values.update({n: Fraction(v) for n, v in zip(names, combo)})
                holds = self.formula(f.body)
                if f.kind == "exists" and holds:
                    return True
                if f.kind == "forall" and not holds:
                    return False
            return f.kind == "forall"
        finally:
            for name in names:
                self.values.pop(name, None)
            self.values.update(saved)


def _check_shape(formula: Formula) -> None:
    """Only INTEGER variables may be quantified below the top level."""
    if isinstance(formula, Quant):
        for name, sort in formula.vars:
            if sort != INTEGER:
                raise UnsupportedQuantifierShape(f"cannot sample a quantifier over {name}: {sort}")
        _check_shape(formula.body)
    elif isinstance(formula, Not):
        _check_shape(formula.arg)
    elif isinstance(formula, (And, Or)):
        for a in formula.args:
            _check_shape(a)
    elif isinstance(formula, Implies):
        _check_shape(formula.left)
        _check_shape(formula.right)


def _scalar_symbol(t: Term) -> Optional[Sym]:
    if isinstance(t, ToReal):
        t = t.arg
    if isinstance(t, Sym) and t.sort in (INTEGER, REAL):
        return t
    return None


def one_point_definitions(hypotheses: Sequence[Formula]) -> List[Tuple[str, Term]]:
    """Equations ``t = v`` among the hypotheses that fix a variable ``v``; right sides first."""
    defined: Dict[str, Term] = {}
    for h in hypotheses:
        if not (isinstance(h, Cmp) and h.op == "="):
            continue
        for target, value in ((h.right, h.left), (h.left, h.right)):
            symbol = _scalar_symbol(target)
            if symbol is None or symbol.name in defined or symbol.name in free_symbols(value):
                continue
            defined[symbol.name] = value
            break
    return list(defined.items())


def _box(hypotheses: Sequence[Formula]) -> Dict[str, Tuple[Fraction, Fraction]]:
    """Constant bounds ``x >= c`` and ``c >= x`` found among the hypotheses."""
    box: Dict[str, Tuple[Fraction, Fraction]] = {}
    for h in hypotheses:
        if not isinstance(h, Cmp) or h.op == "=":
            continue
        left, right = _scalar_symbol(h.left), _scalar_symbol(h.right)
        if left is not None and isinstance(h.right, Num):
            lo, hi = box.get(left.name, (None, None))
            bound = h.right.value
            box[left.name] = (bound if lo is None else max(lo, bound), hi)
        elif right is not None and isinstance(h.left, Num):
            lo, hi = box.get(right.name, (None, None))
            bound = h.left.value
            box[right.name] = (lo, bound if hi is None else min(hi, bound))
    return box


class _Drawer:
    def __init__(self, rng: random.Random, box: Mapping[str, Tuple[Optional[Fraction], Optional[Fraction]]]) -> None:
        self.rng = rng
        self.box = box

    def draw(self, sort: str, name: Optional[str] = None) -> Value:
        lo, hi = self.box.get(name, (None, None)) if name else (None, None)
        if sort == INTEGER:
            low, high = INTEGER_RANGE
            low = max(low, math.ceil(lo)) if lo is not None else low
            high = min(high, math.floor(hi)) if hi is not None else high
            if low > high:
                low, high = INTEGER_RANGE
            return Fraction(self.rng.randint(low, high))
        low_r, high_r = REAL_RANGE
        low_r = max(low_r, lo) if lo is not None else low_r
        high_r = min(high_r, hi) if hi is not None else high_r
        if low_r > high_r:
            low_r, high_r = REAL_RANGE
        k_low, k_high = math.ceil(low_r / GRID), math.floor(high_r / GRID)
        if k_low > k_high:
            return low_r
        return self.rng.randint(k_low, k_high) * GRID


def _split_vc(vc: Union[VC, Formula]) -> Tuple[str, List[Formula], Formula]:
    if isinstance(vc, VC):
        return vc.name, list(vc.hypotheses) + list(vc.guards), vc.conclusion
    _, matrix = strip_forall(vc)
    if isinstance(matrix, Implies):
        return "formula", list(conjuncts(matrix.left)), matrix.right
    return "formula", [], matrix


def _default_functions():
    from erc.corpus.functions import TEST_FUNCTIONS

    return list(TEST_FUNCTIONS.values())


def sample_check(
    vc: Union[VC, Formula],
    samples: int = 10000,
    seed: int = 0,
    functions: Optional[Sequence[object]] = None,
) -> SampleReport:
    """Search for a counterexample to ``vc``.

    Args:
        vc: A generated VC, or any formula (read as ``H => C`` when it is an implication).
        samples: Number of assignments to try.
        seed: Seed of the random generator.
        functions: Candidates for each function symbol, objects with ``at`` and
            ``count_roots``; the test polynomials by default.

    Raises:
        UnsupportedQuantifierShape: A quantifier over REAL, or an unsupported function symbol.
    """
    name, hypotheses, conclusion = _split_vc(vc)
    for part in hypotheses + [conclusion]:
        _check_shape(part)
    candidates = list(functions) if functions is not None else _default_functions()
    free: Dict[str, str] = {}
    for part in hypotheses + [conclusion]:
        free.update(free_symbols(part))
    function_names = sorted(n for n, s in free.items() if is_function_sort(s))
    definitions = one_point_definitions(hypotheses)
    defined = {n for n, _ in definitions}
    scalars = sorted(n for n, s in free.items() if s in (INTEGER, REAL) and n not in defined)
    arrays = sorted(n for n, s in free.items() if is_array_sort(s))
    rng = random.Random(seed)
    drawer = _Drawer(rng, _box(hypotheses))
    report = SampleReport(name)
    for _ in range(samples):
        env = _Assignment({fn: rng.choice(candidates) for fn in function_names})
        for var in scalars:
            env.values[var] = drawer.draw(free[var], var)
        for var in arrays:
            env.arrays[var] = _LazyArray(var, free[var], rng, drawer.draw)
        try:
            _resolve(env, definitions, free, drawer)
            if not all(env.formula(h) for h in hypotheses):
                report.vacuous += 1
                continue
            if not env.formula(conclusion):
                report.counterexample = _snapshot(env)
                logger.info("%s refuted: %s", name, report.counterexample)
                return report
            report.samples += 1
        except (_Skip, _Unbound):
            report.skipped += 1
    logger.debug(report.summary())
    return report


def _resolve(env: _Assignment, definitions: Sequence[Tuple[str, Term]], sorts: Mapping[str, str], drawer: _Drawer):
    pending = list(definitions)
    for _ in range(2):
        unresolved = []
        for var, term in pending:
            try:
                value = env.term(term)
            except _Unbound:
                unresolved.append((var, term))
                continue
            if sorts[var] == INTEGER and value.denominator != 1:
                raise _Skip(f"{var} would not be an integer")
            env.values[var] = value
        pending = unresolved
    for var, _ in pending:
        env.values[var] = drawer.draw(sorts[var], var)


def _format(value: Value) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _snapshot(env: _Assignment) -> Dict[str, str]:
    shown = {name: _format(value) for name, value in sorted(env.values.items())}
    for name, array in sorted(env.arrays.items()):
        for indices, value in sorted(array.entries.items()):
            shown[f"{name}[{', '.join(map(str, indices))}]"] = _format(value)
    for name, fn in sorted(env.functions.items()):
        shown[name] = str(fn)
    return shown


class _FixedArray:
    """A concrete array, read row-major; reads outside it skip the check."""

    def __init__(self, items: Sequence[Value], dims: Sequence[int]) -> None:
        self.items = list(items)
        self.dims = tuple(dims) or (len(self.items),)

    def get(self, indices: Tuple[int, ...]) -> Value:
        flat = 0
        if len(indices) == 1:
            flat = indices[0]
        else:
            for index, dim in zip(indices, self.dims):
                if not 0 <= index < dim:
                    raise _Skip("array index out of range")
                flat = flat * dim + index
        if not 0 <= flat < len(self.items):
            raise _Skip("array index out of range")
        return self.items[flat]


def holds_in_state(
    formula: Formula,
    values: Mapping[str, Value],
    arrays: Optional[Mapping[str, Tuple[Sequence[Value], Sequence[int]]]] = None,
    functions: Optional[Mapping[str, object]] = None,
) -> Optional[bool]:
    """Exact truth value of ``formula`` in one program state.

    Args:
        formula: An assertion over the state's variables.
        values: Scalar variables as exact rationals.
        arrays: Array variables as ``(items, dims)``.
        functions: Test polynomials bound to the function symbols.

    Returns:
        The truth value, or None when the state does not fix it (a variable
        without an exact value, a division by zero).
    """
    env = _Assignment(functions or {})
    env.values.update({name: Fraction(v) for name, v in values.items()})
    for name, (items, dims) in (arrays or {}).items():
        env.arrays[name] = _FixedArray([Fraction(v) for v in items], dims)
    _, matrix = strip_forall(formula)
    try:
        return env.formula(matrix)
    except (_Skip, _Unbound) as exc:
        logger.debug("state leaves %s undecided: %s", formula, exc)
        return None


# -- mutants -----------------------------------------------------------------


def _rewrite_loop(stmt: Stmt, key: str, rewrite: Callable[[str], str], done: List[bool]) -> Stmt:
    if isinstance(stmt, Block):
        return replace(stmt, stmts=tuple(_rewrite_loop(s, key, rewrite, done) for s in stmt.stmts))
    if isinstance(stmt, If):
        return replace(
            stmt,
            then=_rewrite_loop(stmt.then, key, rewrite, done),
            otherwise=_rewrite_loop(stmt.otherwise, key, rewrite, done),
        )
    if isinstance(stmt, While):
        if not done and stmt.annotation(key) is not None:
            annotations = tuple(replace(a, text=rewrite(a.text)) if a.key == key else a for a in stmt.annotations)
            stmt = replace(stmt, annotations=annotations)
            done.append(True)
        return replace(stmt, body=_rewrite_loop(stmt.body, key, rewrite, done))
    return stmt


def _mutated_program(vcset: VcSet, key: str, rewrite: Callable[[str], str]) -> Program:
    if vcset.program is None:
        raise ValueError(f"{vcset.function}: no program to mutate")
    function = vcset.program.function(vcset.function)
    done: List[bool] = []
    body = _rewrite_loop(function.body, key, rewrite, done)
    if not done:
        raise ValueError(f"{vcset.function}: no loop with an {key} annotation")
    functions = tuple(replace(fn, body=body) if fn.name == function.name else fn for fn in vcset.program.functions)
    return replace(vcset.program, functions=functions)


def _regenerate(vcset: VcSet, program: Program) -> VcSet:
    return generate_vcs(program, program.function(vcset.function), vcset.externals)


def _without_predicates(hypotheses: Sequence[Formula]) -> Tuple[Formula, ...]:
    return tuple(h for h in hypotheses if not isinstance(h, Pred))


def _replace_vc(vcset: VcSet, index: int, vc: VC) -> VcSet:
    vcs = list(vcset.vcs)
    vcs[index] = vc
    return replace(vcset, vcs=vcs)


def _epsilon_overstated(vcset: VcSet) -> VcSet:
    return _regenerate(vcset, _mutated_program(vcset, "epsilon", lambda text: f"3 * ({text})"))


def _variant_sign_flipped(vcset: VcSet) -> VcSet:
    return _regenerate(vcset, _mutated_program(vcset, "variant", lambda text: f"-({text})"))


def _invariant_weakened(vcset: VcSet) -> VcSet:
    for index, vc in enumerate(vcset.vcs):
        if vc.origin == "exit" and vc.hypotheses:
            weaker = _without_predicates(vc.hypotheses)
            if weaker == vc.hypotheses:
                weaker = vc.hypotheses[:-1]
            return _replace_vc(vcset, index, replace(vc, hypotheses=weaker))
    raise ValueError(f"{vcset.function}: no loop exit VC to weaken")


def _has_disjunct(formula: Formula) -> bool:
    if isinstance(formula, Or):
        return True
    return isinstance(formula, And) and any(_has_disjunct(arg) for arg in formula.args)


def _definedness_unguarded(vcset: VcSet) -> VcSet:
    for index, vc in enumerate(vcset.vcs):
        if vc.origin == "preservation" and not vc.guards and _has_disjunct(vc.conclusion):
            return _replace_vc(vcset, index, replace(vc, hypotheses=_without_predicates(vc.hypotheses)))
    raise ValueError(f"{vcset.function}: no definedness VC for a choose test")


def _bracket_flipped(vcset: VcSet) -> VcSet:
    for index in reversed(range(len(vcset.vcs))):
        vc = vcset.vcs[index]
        if vc.origin == "preservation" and vc.guards:
            guards = vc.guards[:-1] + (negation(vc.guards[-1]),)
            return _replace_vc(vcset, index, replace(vc, guards=guards))
    raise ValueError(f"{vcset.function}: no guarded preservation VC")


MUTANTS: Dict[str, Callable[[VcSet], VcSet]] = {
    "epsilon_overstated": _epsilon_overstated,
    "variant_sign_flipped": _variant_sign_flipped,
    "invariant_weakened": _invariant_weakened,
    "definedness_unguarded": _definedness_unguarded,
    "bracket_flipped": _bracket_flipped,
}


def mutate_vcset(vcset: VcSet, kind: str) -> VcSet:
    """A VC set with one seeded annotation mistake.

    Raises:
        ValueError: Unknown ``kind``, or nothing in ``vcset`` to apply it to.
    """
    try:
        mutant = MUTANTS[kind]
    except KeyError:
        raise ValueError(f"unknown mutant {kind!r}; expected one of {sorted(MUTANTS)}") from None
    return mutant(vcset)


def refutes(vcset: VcSet, samples: int, seed: int, functions: Optional[Sequence[object]] = None) -> List[SampleReport]:
    """Sample every VC of ``vcset``; a report with a counterexample refutes the set."""
    return [sample_check(vc, samples, seed, functions) for vc in vcset.vcs]

"""Big-step interpreter for checked ERC programs.

REAL values are RealNum nodes, so arithmetic builds a lazy graph and only
comparisons force refinement. A call to a scalar REAL function is exact: it
becomes a ``limit`` whose producer runs the body at the requested precision.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Union

from erc.core.budget import BudgetMeter, EvalBudget
from erc.core.choice import STEP, ChoicePolicy, ChoiceStream, LazyBool, choose
from erc.core.dyadic import Dyadic
from erc.core.real import (
    RealNum,
    gt_partial,
    iota,
    limit,
    real_binop,
    real_from_fraction,
    real_from_integer,
    real_neg,
)
from erc.errors import BudgetExhausted, ErcError, IndexOutOfBounds, InvalidGuard, PreconditionFailed, Span
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
    mentions,
    walk_expr,
)
from erc.lang.trace import Trace
from erc.verify.formula import Formula, is_quantifier_free
from erc.verify.sampler import holds_in_state
from erc.verify.translate import Translator

logger = logging.getLogger(__name__)

ExternalFunction = Callable[..., RealNum]

# first step allowance of a guard that calls functions; doubled on each retry
GUARD_SLICE = 64


class ArrayValue:
    """A fixed-length, sort-homogeneous array; multi-indices are row-major."""

    def __init__(self, base: str, items: List[Any], dims: Sequence[int]) -> None:
        self.base = base
        self.items = items
        self.dims = tuple(dims)

    @classmethod
    def zeros(cls, base: str, dims: Sequence[int]) -> "ArrayValue":
        size = 1
        for d in dims:
            size *= d
        return cls(base, [_zero(base) for _ in range(max(size, 0))], dims)

    def copy(self) -> "ArrayValue":
        return ArrayValue(self.base, list(self.items), self.dims)

    def offset(self, indices: Sequence[int], span: Span) -> int:
        if len(indices) == 1:
            flat = indices[0]
        else:
            if len(indices) != len(self.dims):
                raise IndexOutOfBounds(f"expected {len(self.dims)} indices, got {len(indices)}", span)
            flat = 0
            for index, dim in zip(indices, self.dims):
                if not 0 <= index < dim:
                    raise IndexOutOfBounds(f"index {index} outside 0..{dim - 1}", span)
                flat = flat * dim + index
        if not 0 <= flat < len(self.items):
            raise IndexOutOfBounds(f"index {flat} outside 0..{len(self.items) - 1}", span)
        return flat

    def __len__(self) -> int:
        return len(self.items)

    def __repr__(self) -> str:
        return f"ArrayValue({self.base}, {self.items!r}, dims={self.dims})"


Value = Union[int, RealNum, ArrayValue]


def _zero(base: str) -> Value:
    return real_from_integer(0) if base == REAL else 0


def coerce_value(raw: Any, type_: Type, dims: Sequence[int] = ()) -> Value:
    """Turn a harness or CLI argument into a runtime value of ``type_``."""
    if type_.is_array:
        if isinstance(raw, ArrayValue):
            return raw.copy()
        items = list(_flatten(raw))
        shape = tuple(dims) if dims else (len(items),)
        return ArrayValue(type_.base, [coerce_value(v, Type(type_.base)) for v in items], shape)
    if type_.base == INTEGER:
        if isinstance(raw, bool) or not isinstance(raw, int):
            if isinstance(raw, Fraction) and raw.denominator == 1:
                return int(raw)
            raise ErcError(f"expected an INTEGER argument, got {raw!r}")
        return raw
    if isinstance(raw, RealNum):
        return raw
    if isinstance(raw, Dyadic):
        return real_from_fraction(raw.to_fraction())
    return real_from_fraction(Fraction(raw))


def _flatten(raw: Any):
    for item in raw:
        if isinstance(item, (list, tuple)):
            yield from _flatten(item)
        else:
            yield item


def format_value(value: Value, p: Optional[int], meter: Optional[BudgetMeter] = None) -> str:
    """Trace and CLI rendering: intervals at p for REAL, exact integers, ``{a;b}`` arrays."""
    if isinstance(value, ArrayValue):
        return "{" + ";".join(format_value(v, p, meter) for v in value.items) + "}"
    if isinstance(value, RealNum):
        if p is None:
            raise ErcError("a precision p is needed to print a REAL result")
        return str(value.approx(p, meter))
    return str(value)


class _Return(Exception):
    def __init__(self, value: Value) -> None:
        super().__init__("RETURN")
        self.value = value


class Frame:
    def __init__(self, function: FunctionDef, producer: bool = False) -> None:
        self.function = function
        self.values: Dict[str, Value] = {}
        self.producer = producer


@dataclass
class EvalResult:
    value: Value
    trace: Trace
    final_state: Dict[str, Value] = field(default_factory=dict)
    p: Optional[int] = None

    @property
    def text(self) -> str:
        return self.trace.result


class Interpreter:
    """Evaluates one entry function per ``run``; all state is per run."""

    def __init__(
        self,
        program: Program,
        externals: Optional[Mapping[str, ExternalFunction]] = None,
        policy: Optional[ChoicePolicy] = None,
        budget: Optional[EvalBudget] = None,
    ) -> None:
        self.program = program
        self.externals = dict(externals or {})
        self.policy = policy or ChoicePolicy.left()
        self.budget = budget or EvalBudget()
        self._meter: BudgetMeter = self.budget.meter()
        self._stream: ChoiceStream = self.policy.stream()
        self._trace = Trace()
        self._entry_state: Dict[str, Value] = {}
        self._preconditions: Dict[str, Optional[Formula]] = {}

    def run(self, entry: str, args: Union[Mapping[str, Any], Sequence[Any]] = (), p: Optional[int] = None) -> EvalResult:
        """Evaluate ``entry`` on ``args``.

        Args:
            entry: Function name.
            args: Arguments by name or position; a scalar REAL entry's
                precision parameter is not part of them.
            p: Output precision. Passed as the precision parameter of a
                scalar REAL entry and used to print REAL results.

        Returns:
            EvalResult with the value, the trace and the entry's final state.
        """
        try:
            fn = self.program.function(entry)
        except KeyError:
            raise ErcError(f"no function named '{entry}' in {self.program.source_name}") from None
        self._meter = self.budget.meter()
        self._stream = self.policy.stream()
        self._trace = Trace()
        self._entry_state = {}
        params = fn.params[1:] if fn.is_real_scalar else fn.params
        if isinstance(args, Mapping):
            missing = [prm.name for prm in params if prm.name not in args]
            if missing:
                raise ErcError(f"missing argument(s) for {entry}: {', '.join(missing)}")
            ordered = [args[prm.name] for prm in params]
        else:
            ordered = list(args)
        if len(ordered) != len(params):
            raise ErcError(f"{entry} expects {len(params)} argument(s), got {len(ordered)}")
        if fn.is_real_scalar:
            if p is None:
                raise ErcError(f"REAL function {entry} needs a precision p")
            ordered = [p] + ordered
        logger.debug("running %s with policy %s at p=%s", entry, self.policy, p)
        value = self._invoke(fn, ordered, fn.span, entry=True, raw=True)
        text = format_value(value, p, self._meter)
        self._trace.min_precision = self._meter.finest
        self._trace.steps = self._meter.steps
        self._trace.result = text
        return EvalResult(value, self._trace, dict(self._entry_state), p)

    # -- calls --------------------------------------------------------------

    def _invoke(
        self,
        fn: FunctionDef,
        args: List[Any],
        span: Span,
        entry: bool = False,
        raw: bool = False,
        producer: bool = False,
    ) -> Value:
        self._meter.enter(span)
        frame = Frame(fn, producer=producer)
        try:
            for param, arg in zip(fn.params, args):
                dims: List[int] = []
                if param.type.is_array and param.type.dims:
                    dims = [self._int(self._eval(d, frame), d.span) for d in param.type.dims]
                if raw:
                    value = coerce_value(arg, param.type, dims)
                elif isinstance(arg, ArrayValue):
                    value = arg.copy()
                    if dims:
                        value = ArrayValue(arg.base, value.items, dims)
                else:
                    value = arg
                if isinstance(value, ArrayValue) and dims:
                    size = 1
                    for d in dims:
                        size *= d
                    if size != len(value):
                        raise ErcError(
                            f"argument '{param.name}' of {fn.name} has {len(value)} elements, expected {size}",
                            param.span,
                        )
                frame.values[param.name] = value
            self._check_precondition(fn, frame, span)
            try:
                self._exec(fn.body, frame)
            except _Return as ret:
                if entry:
                    self._entry_state = dict(frame.values)
                return ret.value
            raise ErcError(f"function '{fn.name}' finished without RETURN", fn.span)
        finally:
            self._meter.leave()

    def _precondition(self, fn: FunctionDef) -> Optional[Formula]:
        if fn.name not in self._preconditions:
            annotation = fn.annotation("pre")
            formula = None
            if annotation is not None:
                externals = {name: Signature((REAL,), REAL) for name in self.externals}
                try:
                    formula = Translator(self.program, fn, externals).formula(annotation)
                    if not is_quantifier_free(formula):
                        formula = None
                except ErcError as exc:
                    logger.debug("precondition of %s is not checked: %s", fn.name, exc)
            self._preconditions[fn.name] = formula
        return self._preconditions[fn.name]

    def _check_precondition(self, fn: FunctionDef, frame: Frame, span: Span) -> None:
        """Reject a call whose exact arguments falsify ``pre``; undecided calls go ahead."""
        pre = self._precondition(fn)
        if pre is None:
            return
        values: Dict[str, Fraction] = {}
        arrays: Dict[str, Any] = {}
        for name, value in frame.values.items():
            if isinstance(value, ArrayValue):
                items = [_exact(v) for v in value.items]
                if all(v is not None for v in items):
                    arrays[name] = (items, value.dims or (len(items),))
            elif _exact(value) is not None:
                values[name] = _exact(value)
        polynomials = {name: f for name, f in self.externals.items() if hasattr(f, "count_roots")}
        try:
            holds = holds_in_state(pre, values, arrays, polynomials)
        except ErcError:
            holds = None
        if holds is False:
            shown = ", ".join(f"{name}={values[name]}" for name in sorted(values))
            raise PreconditionFailed(f"precondition of {fn.name} fails for {shown}", span)

    def _call(self, expr: Call, frame: Frame) -> Value:
        args = [self._eval(a, frame) for a in expr.args]
        if expr.name in self.externals:
            return self.externals[expr.name](*args)
        try:
            fn = self.program.function(expr.name)
        except KeyError:
            raise ErcError(f"no binding for function '{expr.name}'", expr.span) from None
        if fn.is_real_scalar:
            span = expr.span

            def producer(q: int) -> RealNum:
                value = self._invoke(fn, [q] + args, span, producer=True)
                assert isinstance(value, RealNum)
                return value

            return limit(producer, label=fn.name)
        return self._invoke(fn, args, expr.span, producer=frame.producer)

    # -- statements ---------------------------------------------------------

    def _exec(self, stmt: Stmt, frame: Frame) -> None:
        if isinstance(stmt, Block):
            for inner in stmt.stmts:
                self._exec(inner, frame)
        elif isinstance(stmt, Decl):
            if stmt.type.is_array:
                dims = [self._int(self._eval(d, frame), d.span) for d in stmt.type.dims or ()]
                value: Value = ArrayValue.zeros(stmt.type.base, dims)
                if stmt.init is not None:
                    init = self._eval(stmt.init, frame)
                    assert isinstance(init, ArrayValue)
                    value = ArrayValue(init.base, list(init.items), init.dims)
                frame.values[stmt.name] = value
            else:
                frame.values[stmt.name] = (
                    self._eval(stmt.init, frame) if stmt.init is not None else _zero(stmt.type.base)
                )
        elif isinstance(stmt, Assign):
            value = self._eval(stmt.value, frame)
            frame.values[stmt.target] = value.copy() if isinstance(value, ArrayValue) else value
        elif isinstance(stmt, IndexAssign):
            array = frame.values[stmt.target]
            assert isinstance(array, ArrayValue)
            indices = [self._int(self._eval(i, frame), i.span) for i in stmt.indices]
            offset = array.offset(indices, stmt.span)
            array.items[offset] = self._eval(stmt.value, frame)
        elif isinstance(stmt, If):
            if self._truth(self._eval(stmt.test, frame), stmt.test.span):
                self._exec(stmt.then, frame)
            else:
                self._exec(stmt.otherwise, frame)
        elif isinstance(stmt, While):
            while self._truth(self._eval(stmt.test, frame), stmt.test.span):
                self._meter.charge(1, stmt.span)
                self._exec(stmt.body, frame)
        elif isinstance(stmt, Return):
            raise _Return(self._eval(stmt.value, frame))
        else:
            raise ErcError(f"cannot execute {type(stmt).__name__}", stmt.span)

    # -- expressions --------------------------------------------------------

    def _eval(self, expr: Expr, frame: Frame) -> Value:
        if isinstance(expr, IntLit):
            return real_from_integer(expr.value) if expr.sort == REAL else expr.value
        if isinstance(expr, Var):
            return frame.values[expr.name]
        if isinstance(expr, Unary):
            operand = self._eval(expr.operand, frame)
            return real_neg(operand) if isinstance(operand, RealNum) else -operand
        if isinstance(expr, Binary):
            return self._binary(expr, frame)
        if isinstance(expr, Iota):
            return iota(self._int(self._eval(expr.arg, frame), expr.span))
        if isinstance(expr, Choose):
            return self._choose(expr, frame)
        if isinstance(expr, Cond):
            if self._truth(self._eval(expr.test, frame), expr.test.span):
                return self._eval(expr.then, frame)
            return self._eval(expr.otherwise, frame)
        if isinstance(expr, Call):
            return self._call(expr, frame)
        if isinstance(expr, Index):
            array = frame.values[expr.name]
            assert isinstance(array, ArrayValue)
            indices = [self._int(self._eval(i, frame), i.span) for i in expr.indices]
            return array.items[array.offset(indices, expr.span)]
        raise ErcError(f"cannot evaluate {type(expr).__name__}", expr.span)

    def _binary(self, expr: Binary, frame: Frame) -> Value:
        left = self._eval(expr.left, frame)
        right = self._eval(expr.right, frame)
        if isinstance(left, RealNum) and isinstance(right, RealNum):
            if expr.op == ">":
                try:
                    result = gt_partial(left, right, self._meter)
                except BudgetExhausted as exc:
                    raise exc.at(expr.span)
                self._trace.compare(expr.span.site, result)
                return result
            return real_binop(_REAL_OPS[expr.op], left, right)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == ">":
            return int(left > right)
        if expr.op == "=":
            return int(left == right)
        raise ErcError(f"operator '{expr.op}' on {expr.sort}", expr.span)

    def _choose(self, expr: Choose, frame: Frame) -> int:
        branches = [self._lazy(arg, frame) for arg in expr.args]
        precision = frame.function.precision_param
        bound = frame.producer or (precision is not None and any(mentions(a, precision) for a in expr.args))
        site = expr.span.site

        def observe(states: List[str], picked: int) -> None:
            self._trace.choose(site, states, picked, precision_bound=bound)

        return choose(branches, self._stream, self._meter, observe=observe, span=expr.span)

    def _lazy(self, expr: Expr, frame: Frame) -> LazyBool:
        if isinstance(expr, Binary) and expr.op == ">" and expr.left.sort == REAL:
            left = self._eval(expr.left, frame)
            right = self._eval(expr.right, frame)
            assert isinstance(left, RealNum) and isinstance(right, RealNum)
            return LazyBool.compare(left, right)
        if isinstance(expr, Cond):
            test = self._lazy(expr.test, frame)
            if isinstance(expr.otherwise, IntLit) and expr.otherwise.value == 0:
                return test.conjunction(self._lazy(expr.then, frame))
            return test.conditional(self._lazy(expr.then, frame), self._lazy(expr.otherwise, frame))
        if isinstance(expr, IntLit):
            return LazyBool.constant(self._truth(expr.value, expr.span))

        if not any(isinstance(node, Call) for node in walk_expr(expr)):

            def immediate(meter: BudgetMeter):
                return self._truth(self._eval(expr, frame), expr.span)
                yield  # makes this a generator

            return LazyBool.from_generator(immediate, label="expr")

        # calls may diverge, so they run in growing slices paid for in steps
        def sliced(meter: BudgetMeter):
            allowance = GUARD_SLICE
            while True:
                for _ in range(allowance):
                    yield STEP
                value = self._eval_within(expr, frame, allowance)
                if value is not None:
                    return self._truth(value, expr.span)
                allowance *= 2

        return LazyBool.from_generator(sliced, label="call")

    def _eval_within(self, expr: Expr, frame: Frame, steps: int) -> Optional[Value]:
        """``expr`` evaluated on at most ``steps`` steps, or None when they run out.

        A failed attempt leaves no choose picks in the trace and draws nothing
        from the policy stream, so retries see the same choices.
        """
        outer, stream, trace = self._meter, self._stream, self._trace
        inner = EvalBudget(
            max_steps=steps,
            min_precision=outer.min_precision,
            max_depth=outer.budget.max_depth,
        ).meter()
        inner.depth = outer.depth
        self._meter, self._stream, self._trace = inner, stream.fork(), Trace()
        try:
            value = self._eval(expr, frame)
        except BudgetExhausted as exc:
            if exc.reason != "steps":
                raise
            return None
        finally:
            outer.finest = min(outer.finest, inner.finest)
            attempt_stream, attempt_trace = self._stream, self._trace
            self._meter, self._stream, self._trace = outer, stream, trace
        self._stream = attempt_stream
        trace.records.extend(attempt_trace.records)
        return value

    @staticmethod
    def _truth(value: Value, span: Span) -> bool:
        if not isinstance(value, int) or value not in (0, 1):
            raise InvalidGuard(f"test evaluated to {value!r}, expected 0 or 1", span)
        return value == 1

    @staticmethod
    def _int(value: Value, span: Span) -> int:
        if not isinstance(value, int):
            raise ErcError(f"expected an INTEGER, got {value!r}", span)
        return value


_REAL_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div"}


def _exact(value: Value) -> Optional[Fraction]:
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, RealNum):
        return value.exact
    return None


def evaluate(
    program: Program,
    entry: str,
    args: Union[Mapping[str, Any], Sequence[Any]] = (),
    p: Optional[int] = None,
    policy: Optional[ChoicePolicy] = None,
    budget: Optional[EvalBudget] = None,
    externals: Optional[Mapping[str, ExternalFunction]] = None,
) -> EvalResult:
    return Interpreter(program, externals, policy, budget).run(entry, args, p)


def trace_program(
    program: Program,
    entry: str,
    args: Union[Mapping[str, Any], Sequence[Any]] = (),
    p: Optional[int] = None,
    policy: Optional[ChoicePolicy] = None,
    budget: Optional[EvalBudget] = None,
    externals: Optional[Mapping[str, ExternalFunction]] = None,
) -> Trace:
    """The trace of one evaluation; identical inputs give identical bytes."""
    return evaluate(program, entry, args, p, policy, budget, externals).trace


@dataclass
class ConsistencyReport:
    first: EvalResult
    second: EvalResult
    choices_agree: bool
    bound_holds: Optional[bool]
    distance: Optional[Fraction]

    @property
    def bound(self) -> Fraction:
        p = self.first.p or 0
        return Fraction(2) ** p + Fraction(2) ** (p - 1)


def _distance(a: Value, b: Value, p: int, meter: BudgetMeter) -> Fraction:
    """Upper bound of |a - b|, elementwise maximum for arrays."""
    if isinstance(a, ArrayValue) and isinstance(b, ArrayValue):
        return max((_distance(x, y, p, meter) for x, y in zip(a.items, b.items)), default=Fraction(0))
    if isinstance(a, RealNum) and isinstance(b, RealNum):
        if a.exact is not None and b.exact is not None:
            return abs(a.exact - b.exact)
        enclosure = real_binop("sub", a, b).approx(p - 10, meter)
        return max(abs(enclosure.lo), abs(enclosure.hi)).to_fraction()
    return Fraction(abs(int(a) - int(b)))


def eval_consistency_check(
    program: Program,
    entry: str,
    args: Union[Mapping[str, Any], Sequence[Any]],
    p: int,
    policy: Optional[ChoicePolicy] = None,
    second_policy: Optional[ChoicePolicy] = None,
    budget: Optional[EvalBudget] = None,
    externals: Optional[Mapping[str, ExternalFunction]] = None,
) -> ConsistencyReport:
    """Run at p and at p-1 and compare when the shared choose calls agree.

    Calls are paired by site and per-site ordinal. Calls whose arguments depend
    on the requested precision are different calls in the two runs and are
    left out of the pairing.
    """
    policy = policy or ChoicePolicy.left()
    first = evaluate(program, entry, args, p, policy, budget, externals)
    second = evaluate(program, entry, args, p - 1, second_policy or policy, budget, externals)
    picks_a = first.trace.choices_by_site()
    picks_b = second.trace.choices_by_site()
    agree = all(
        x == y
        for site in picks_a.keys() & picks_b.keys()
        for x, y in zip(picks_a[site], picks_b[site])
    )
    meter = (budget or EvalBudget()).meter()
    distance = _distance(first.value, second.value, p, meter)
    bound_holds: Optional[bool] = None
    if agree:
        fn = program.function(entry)
        if fn.ret.base == INTEGER:
            bound_holds = distance == 0
        else:
            bound_holds = distance <= Fraction(2) ** p + Fraction(2) ** (p - 1)
    else:
        logger.info("choices differ between p=%d and p=%d; bound not asserted", p, p - 1)
    return ConsistencyReport(first, second, agree, bound_holds, distance)

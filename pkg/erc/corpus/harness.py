"""Runs the corpus cases against their oracles."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from erc.config import Settings
from erc.core.budget import BudgetMeter
from erc.core.choice import ChoicePolicy
from erc.core.real import RealNum
from erc.corpus.cases import CASES, CaseInput, CorpusCase, Observation, ObservedValue
from erc.corpus.functions import F_SIGNATURE, Polynomial
from erc.errors import BudgetExhausted, ErcError, PreconditionFailed
from erc.lang import load_program
from erc.lang.ast import FunctionDef, Program
from erc.lang.evaluator import ArrayValue, EvalResult, Value, evaluate
from erc.verify.formula import Formula
from erc.verify.sampler import holds_in_state
from erc.verify.translate import RESULT, Translator

logger = logging.getLogger(__name__)

MANIFEST = "corpus.json"
DEFAULT_GUARD_BITS = 8


@dataclass(frozen=True)
class CaseConfig:
    seed: int
    count: int
    quick_count: int
    precisions: Sequence[Optional[int]]
    slack: int = 0


@dataclass
class CaseResult:
    name: str
    runs: int = 0
    passed: int = 0
    failures: List[str] = field(default_factory=list)
    precondition_violations: int = 0
    post_undecided: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        line = f"{self.name}: {self.passed}/{self.runs} passed"
        if self.precondition_violations:
            line += f", {self.precondition_violations} precondition violation(s)"
        if self.post_undecided:
            line += f", postcondition undecided in {self.post_undecided}"
        return line


def load_manifest(corpus_dir: Union[str, Path]) -> Dict[str, Any]:
    path = Path(corpus_dir) / MANIFEST
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except ValueError as exc:
        raise ErcError(f"cannot read {path}: {exc}") from None


def case_config(manifest: Dict[str, Any], name: str) -> CaseConfig:
    try:
        entry = manifest["cases"][name]
    except KeyError:
        raise ErcError(f"corpus manifest has no case {name!r}") from None
    return CaseConfig(
        seed=int(entry["seed"]),
        count=int(entry["count"]),
        quick_count=int(entry.get("quick_count", entry["count"])),
        precisions=list(entry.get("precisions", [None])),
        slack=int(entry.get("slack", 0)),
    )


def tolerance(p: Optional[int], slack: int, guard_bits: int = DEFAULT_GUARD_BITS) -> Fraction:
    """``2^(p + slack)`` plus room for enclosures taken ``guard_bits`` finer than p."""
    if p is None:
        return Fraction(0)
    return Fraction(2) ** (p + slack) + Fraction(2) ** (p - guard_bits + 1)


def _observed(value: Value, p: Optional[int], guard_bits: int, meter: BudgetMeter) -> ObservedValue:
    if isinstance(value, ArrayValue):
        return [_observed(v, p, guard_bits, meter) for v in value.items]
    if isinstance(value, RealNum):
        if value.exact is not None:
            return value.exact, value.exact
        if p is None:
            raise ErcError("a REAL result needs a precision")
        interval = value.approx(p - guard_bits, meter)
        return interval.lo.to_fraction(), interval.hi.to_fraction()
    return value


def observe(result: EvalResult, guard_bits: int, meter: BudgetMeter) -> Observation:
    choices = result.trace.choices
    return Observation(
        value=_observed(result.value, result.p, guard_bits, meter),
        p=result.p,
        chooses=len(choices),
        free_chooses=sum(1 for c in choices if not c.precision_bound),
    )


def _exact(value: Value) -> Optional[Fraction]:
    if isinstance(value, RealNum):
        return value.exact
    if isinstance(value, int):
        return Fraction(value)
    return None


def post_state_holds(post: Formula, result: EvalResult, inp: CaseInput) -> Optional[bool]:
    """The postcondition on the entry's final state, decided exactly; None if undecidable."""
    values: Dict[str, Fraction] = {}
    arrays = {}
    state = dict(result.final_state)
    state[RESULT] = result.value
    for name, value in state.items():
        if isinstance(value, ArrayValue):
            items = [_exact(v) for v in value.items]
            if all(v is not None for v in items):
                arrays[name] = (items, value.dims)
            continue
        exact = _exact(value)
        if exact is not None:
            values[name] = exact
    return holds_in_state(post, values, arrays, inp.functions)


def _policy(settings: Settings, run: int) -> ChoicePolicy:
    policy = settings.policy()
    if policy.mode == "random":
        return ChoicePolicy.seeded((policy.seed or 0) + run)
    return policy


def _load(case: CorpusCase, corpus_dir: Path) -> Program:
    externals = {name: F_SIGNATURE for name in case.bound_functions}
    return load_program(corpus_dir / case.source, externals)


def _postcondition(program: Program, fn: FunctionDef, case: CorpusCase) -> Optional[Formula]:
    annotation = fn.annotation("post")
    if annotation is None:
        return None
    externals = {name: F_SIGNATURE for name in case.bound_functions}
    return Translator(program, fn, externals).formula(annotation)


def run_entry(
    case: CorpusCase,
    args: Sequence[Any],
    p: Optional[int],
    policy: ChoicePolicy,
    settings: Settings,
    functions: Optional[Mapping[str, Polynomial]] = None,
) -> EvalResult:
    """Evaluate one corpus program once, e.g. ``Round(5/2)`` under a given policy.

    Raises:
        ErcError: The source does not load, or evaluation fails.
    """
    program = _load(case, Path(settings.corpus_dir))
    return evaluate(program, case.entry, tuple(args), p, policy, settings.budget(), functions or {})


def run_case(
    case: CorpusCase,
    config: CaseConfig,
    settings: Settings,
    quick: bool = False,
    guard_bits: int = DEFAULT_GUARD_BITS,
) -> CaseResult:
    """Run one case ``count`` times per precision and judge every run by its oracle."""
    outcome = CaseResult(case.name)
    corpus_dir = Path(settings.corpus_dir)
    try:
        program = _load(case, corpus_dir)
        fn = program.function(case.entry)
        post = _postcondition(program, fn, case)
    except (ErcError, KeyError, OSError) as exc:
        logger.error("Cannot load case %s: %s", case.name, exc)
        outcome.failures.append(f"cannot load {case.source}: {exc}")
        return outcome

    missing = [key for key in case.annotations if fn.annotation(key) is None]
    if missing:
        outcome.failures.append(f"{case.entry} lacks annotation(s): {', '.join(missing)}")

    budget = settings.budget()
    rng = random.Random(config.seed)
    count = config.quick_count if quick else config.count
    run = 0
    for p in config.precisions:
        allowed = tolerance(p, config.slack, guard_bits)
        for _ in range(count):
            inp = case.generator(rng, p)
            run += 1
            outcome.runs += 1
            try:
                result = evaluate(program, case.entry, inp.args, p, _policy(settings, run), budget, inp.functions)
            except BudgetExhausted as exc:
                if case.expect_budget:
                    outcome.passed += 1
                    logger.info("%s %s: diverged as expected at %s", case.name, inp.label, exc.span)
                elif case.precondition is not None and not case.precondition(inp):
                    outcome.precondition_violations += 1
                    logger.warning("%s %s: precondition violated, %s", case.name, inp.label, exc)
                else:
                    outcome.failures.append(f"{inp.label} p={p}: {exc}")
                continue
            except PreconditionFailed as exc:
                if case.precondition is not None and not case.precondition(inp):
                    outcome.precondition_violations += 1
                    logger.warning("%s %s: precondition violated, %s", case.name, inp.label, exc)
                else:
                    outcome.failures.append(f"{inp.label} p={p}: {exc}")
                continue
            except ErcError as exc:
                outcome.failures.append(f"{inp.label} p={p}: {exc}")
                continue

            if case.expect_budget:
                outcome.failures.append(f"{inp.label} p={p}: expected the run to diverge")
                continue

            failure = case.oracle(inp, observe(result, guard_bits, budget.meter()), allowed)
            if failure is None and post is not None:
                holds = post_state_holds(post, result, inp)
                if holds is None:
                    outcome.post_undecided += 1
                elif not holds:
                    failure = f"{inp.label} p={p}: final state violates the postcondition"
            if failure is None:
                outcome.passed += 1
            else:
                outcome.failures.append(failure)
                logger.warning("%s: %s", case.name, failure)
    return outcome


def run_corpus(
    settings: Settings,
    names: Optional[Sequence[str]] = None,
    quick: bool = False,
) -> List[CaseResult]:
    """Run the named corpus cases, all of them by default.

    Args:
        settings: Budget, policy and corpus directory.
        names: Case names from ``CASES``.
        quick: Use each case's reduced run count.

    Returns:
        One CaseResult per case, in order.
    """
    manifest = load_manifest(settings.corpus_dir)
    guard_bits = int(manifest.get("guard_bits", DEFAULT_GUARD_BITS))
    selected = list(names) if names else list(CASES)
    unknown = [n for n in selected if n not in CASES]
    if unknown:
        raise ErcError(f"unknown corpus case(s): {', '.join(unknown)}; choose from {', '.join(CASES)}")

    logger.info("=" * 50)
    logger.info("Running %d corpus case(s) with policy %s...", len(selected), settings.policy())
    logger.info("=" * 50)

    results: List[CaseResult] = []
    for name in selected:
        config = case_config(manifest, name)
        logger.info("Case %s: %d run(s) per precision", name, config.quick_count if quick else config.count)
        result = run_case(CASES[name], config, settings, quick, guard_bits)
        logger.info(result.summary())
        results.append(result)

    failed = [r.name for r in results if not r.ok]
    if failed:
        logger.error("Corpus failures in: %s", ", ".join(failed))
    else:
        logger.info("All %d corpus case(s) passed", len(results))
    return results

"""Corpus cases: which program to run, on what inputs, judged by which oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

from erc.corpus.functions import TEST_FUNCTIONS, Polynomial
from erc.corpus.oracles import (
    Enclosure,
    distance_bound,
    exp_bracket,
    matrix_rank,
    midpoints,
    pivot_admissible,
    residual_norm,
    root_bracket,
    round_admissible,
    round_scaling_bound,
    trisection_round_bound,
)

ObservedValue = Union[int, Enclosure, List[Enclosure]]

TRISECTION_FUNCTIONS = ("linear_2x_minus_1", "affine_x_minus_third", "cubic")


@dataclass(frozen=True)
class CaseInput:
    args: Tuple[Any, ...]
    functions: Mapping[str, Polynomial] = field(default_factory=dict)
    label: str = ""


@dataclass(frozen=True)
class Observation:
    """What one run produced, as exact rationals.

    REAL results are enclosures computed a few bits finer than p; ``chooses``
    counts every resolved choose and ``free_chooses`` the ones whose
    arguments do not depend on the precision.
    """

    value: ObservedValue
    p: Optional[int]
    chooses: int
    free_chooses: int


Generator = Callable[[random.Random, Optional[int]], CaseInput]
Oracle = Callable[[CaseInput, Observation, Fraction], Optional[str]]


@dataclass(frozen=True)
class CorpusCase:
    name: str
    source: str
    entry: str
    generator: Generator
    oracle: Oracle
    annotations: Tuple[str, ...] = ()
    precondition: Optional[Callable[[CaseInput], bool]] = None
    expect_budget: bool = False
    bound_functions: Tuple[str, ...] = ()


def _rational(rng: random.Random, magnitude: int, denominators: Tuple[int, ...]) -> Fraction:
    den = rng.choice(denominators)
    return Fraction(rng.randint(-magnitude * den, magnitude * den), den)


# -- Round -------------------------------------------------------------------


def round_input(rng: random.Random, p: Optional[int]) -> CaseInput:
    x = _rational(rng, 2**12, (1, 2, 3, 4, 7, 8, 1024))
    return CaseInput((x,), label=f"x={x}")


def round_oracle(inp: CaseInput, obs: Observation, tolerance: Fraction) -> Optional[str]:
    (x,) = inp.args
    if obs.value not in round_admissible(x):
        return f"Round({x}) = {obs.value}, expected one of {sorted(round_admissible(x))}"
    bound = round_scaling_bound(x)
    # l + 1 scaling tests and at most two digit tests per digit
    if obs.free_chooses > 3 * bound + 1:
        return f"Round({x}) made {obs.free_chooses} choose calls, more than {3 * bound + 1}"
    return None


# -- Pivot -------------------------------------------------------------------


def pivot_input(rng: random.Random, p: Optional[int]) -> CaseInput:
    m = rng.randint(1, 5)
    M = [_rational(rng, 4, (1, 2, 3)) if rng.random() < 0.7 else Fraction(0) for _ in range(m)]
    if not any(M):
        M[rng.randrange(m)] = Fraction(1)
    return CaseInput((m, M), label=f"M={[str(v) for v in M]}")


def pivot_oracle(inp: CaseInput, obs: Observation, tolerance: Fraction) -> Optional[str]:
    m, M = inp.args
    if obs.value not in pivot_admissible(M):
        return f"Pivot({[str(v) for v in M]}) = {obs.value}, not a nonzero entry"
    return None


# -- Gauss -------------------------------------------------------------------


def gauss_input(rng: random.Random, p: Optional[int]) -> CaseInput:
    """A d x d matrix of rank r built as a sum of r outer products."""
    d = rng.randint(2, 3)
    r = rng.randint(0, d - 1)
    while True:
        A = [[Fraction(0)] * d for _ in range(d)]
        for _ in range(r):
            u = [rng.randint(-3, 3) for _ in range(d)]
            v = [rng.randint(-3, 3) for _ in range(d)]
            for i in range(d):
                for j in range(d):
                    A[i][j] += u[i] * v[j]
        if matrix_rank(A) == r:
            return CaseInput((d, r, A), label=f"d={d} r={r} A={[[str(v) for v in row] for row in A]}")


def gauss_precondition(inp: CaseInput) -> bool:
    d, r, A = inp.args
    return matrix_rank(A) == r < d


def gauss_oracle(inp: CaseInput, obs: Observation, tolerance: Fraction) -> Optional[str]:
    d, r, A = inp.args
    if not isinstance(obs.value, list) or len(obs.value) != d:
        return f"Gauss returned {obs.value!r}, expected {d} entries"
    x = midpoints(obs.value)
    if max(abs(v) for v in x) <= tolerance:
        return "Gauss returned the zero vector"
    residual = residual_norm(A, x)
    if residual > tolerance:
        return f"residual {float(residual):.3g} exceeds {float(tolerance):.3g}"
    return None


# -- Trisection --------------------------------------------------------------


def trisection_input(rng: random.Random, p: Optional[int]) -> CaseInput:
    key = rng.choice(TRISECTION_FUNCTIONS)
    return CaseInput((), {"f": TEST_FUNCTIONS[key]}, label=f"f={key}")


def trisection_oracle(inp: CaseInput, obs: Observation, tolerance: Fraction) -> Optional[str]:
    assert obs.p is not None and isinstance(obs.value, tuple)
    f = inp.functions["f"]
    bracket = root_bracket(f, Fraction(2) ** (obs.p - 16))
    distance = distance_bound(obs.value, bracket)
    if distance > tolerance:
        return f"{inp.label}: {float(distance):.3g} from the root, allowed {float(tolerance):.3g}"
    # one loop test per round plus the last, one bracket test per round
    rounds = (obs.chooses - 1) // 2
    if rounds > trisection_round_bound(obs.p):
        return f"{inp.label}: {rounds} rounds, more than {trisection_round_bound(obs.p)}"
    return None


def bisection_input(rng: random.Random, p: Optional[int]) -> CaseInput:
    return CaseInput((), {"f": TEST_FUNCTIONS["shifted_half"]}, label="f=shifted_half")


def no_oracle(inp: CaseInput, obs: Observation, tolerance: Fraction) -> Optional[str]:
    return None


# -- Exp ---------------------------------------------------------------------


def exp_input(rng: random.Random, p: Optional[int]) -> CaseInput:
    x = Fraction(rng.randint(0, 16), 8)
    return CaseInput((x,), label=f"x={x}")


def exp_any_input(rng: random.Random, p: Optional[int]) -> CaseInput:
    x = Fraction(rng.randint(-24, 48), 24)
    return CaseInput((x,), label=f"x={x}")


def exp_oracle(inp: CaseInput, obs: Observation, tolerance: Fraction) -> Optional[str]:
    (x,) = inp.args
    assert isinstance(obs.value, tuple)
    distance = distance_bound(obs.value, exp_bracket(x))
    if distance > tolerance:
        return f"exp({x}): off by up to {float(distance):.3g}, allowed {float(tolerance):.3g}"
    return None


CASES: Dict[str, CorpusCase] = {
    case.name: case
    for case in (
        CorpusCase("round", "round.erc", "Round", round_input, round_oracle, ("post",)),
        CorpusCase("pivot", "pivot.erc", "Pivot", pivot_input, pivot_oracle, ("pre", "post")),
        CorpusCase(
            "gauss",
            "gauss.erc",
            "Gauss",
            gauss_input,
            gauss_oracle,
            precondition=gauss_precondition,
        ),
        CorpusCase(
            "trisection",
            "trisection.erc",
            "Trisection",
            trisection_input,
            trisection_oracle,
            ("pre", "post"),
            bound_functions=("f",),
        ),
        CorpusCase(
            "bisection",
            "bisection.erc",
            "Bisection",
            bisection_input,
            no_oracle,
            ("pre", "post"),
            expect_budget=True,
            bound_functions=("f",),
        ),
        CorpusCase("exp", "exp.erc", "Exp", exp_input, exp_oracle, ("pre",)),
        CorpusCase("exp_any", "exp.erc", "ExpAny", exp_any_input, exp_oracle, ("pre",)),
    )
}

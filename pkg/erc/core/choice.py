"""Multivalued tests: lazy booleans, the parallel-or ``choose`` and soft tests.

Branches are generators. Each yields STEP after one unit of work or LEVEL after
finishing a precision level, and returns its bool. ``choose`` advances all
undetermined branches round-robin, so a diverging branch never starves one
that eventually becomes true.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Callable, Generator, Iterator, List, Optional, Sequence

from erc.core.budget import BudgetLike, BudgetMeter, as_meter
from erc.core.real import RealNum, iota, real_neg
from erc.errors import BudgetExhausted, Span

logger = logging.getLogger(__name__)

STEP = "step"
LEVEL = "level"

# Work a branch may do in one round before yielding to the next branch.
DEFAULT_QUANTUM = 256

TRUE, FALSE, UNDETERMINED = "T", "F", "U"

BranchGenerator = Generator[str, None, bool]
BranchFactory = Callable[[BudgetMeter], BranchGenerator]


def precision_schedule(min_precision: int) -> Iterator[int]:
    """0, -1, -2, -4, -8, ... ending exactly at ``min_precision``."""
    p = 0
    while True:
        p = max(p, min_precision)
        yield p
        if p == min_precision:
            return
        p = p * 2 if p < 0 else -1


class LazyBool:
    """A suspended boolean, refined in bounded increments."""

    def __init__(self, factory: BranchFactory, label: str = "lazy") -> None:
        self._factory = factory
        self.label = label

    def start(self, meter: BudgetMeter) -> "BranchRun":
        return BranchRun(self._factory(meter), meter)

    def evaluate(self, budget: Optional[BudgetLike] = None) -> bool:
        """Run to completion; raises BudgetExhausted if it never settles."""
        meter = as_meter(budget)
        run = self.start(meter)
        while run.state == UNDETERMINED:
            run.advance()
            if run.exhausted is not None:
                raise run.exhausted
        return run.state == TRUE

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: bool) -> "LazyBool":
        def factory(meter: BudgetMeter) -> BranchGenerator:
            return value
            yield  # pragma: no cover

        return cls(factory, label=str(int(value)))

    @classmethod
    def compare(cls, x: RealNum, y: RealNum) -> "LazyBool":
        """The partial test ``x > y``, one precision level per LEVEL."""

        def factory(meter: BudgetMeter) -> BranchGenerator:
            for p in precision_schedule(meter.min_precision):
                ix = x.approx(p, meter)
                iy = y.approx(p, meter)
                if ix.lo > iy.hi:
                    return True
                if ix.hi < iy.lo:
                    return False
                yield LEVEL
            raise BudgetExhausted(
                f"operands still overlap at precision 2^{meter.min_precision}",
                reason="precision",
            )

        return cls(factory, label="cmp")

    @classmethod
    def after(cls, k: int, value: bool = True) -> "LazyBool":
        """Settles to ``value`` after exactly ``k`` steps."""

        def factory(meter: BudgetMeter) -> BranchGenerator:
            for _ in range(k):
                yield STEP
            return value

        return cls(factory, label=f"after({k})")

    @classmethod
    def diverging(cls) -> "LazyBool":
        def factory(meter: BudgetMeter) -> BranchGenerator:
            while True:
                yield STEP

        return cls(factory, label="diverging")

    @classmethod
    def from_generator(cls, fn: BranchFactory, label: str = "gen") -> "LazyBool":
        return cls(fn, label=label)

    # -- composition --------------------------------------------------------

    def conjunction(self, other: "LazyBool") -> "LazyBool":
        """Lazy ``self && other``: ``other`` starts only once ``self`` is true."""

        def factory(meter: BudgetMeter) -> BranchGenerator:
            if not (yield from self._factory(meter)):
                return False
            return (yield from other._factory(meter))

        return LazyBool(factory, label=f"({self.label}&&{other.label})")

    def conditional(self, then: "LazyBool", otherwise: "LazyBool") -> "LazyBool":
        def factory(meter: BudgetMeter) -> BranchGenerator:
            if (yield from self._factory(meter)):
                return (yield from then._factory(meter))
            return (yield from otherwise._factory(meter))

        return LazyBool(factory, label=f"({self.label}?{then.label}:{otherwise.label})")


class BranchRun:
    """One running branch inside a ``choose`` call."""

    def __init__(self, generator: BranchGenerator, meter: BudgetMeter) -> None:
        self._generator = generator
        self._meter = meter
        self.state = UNDETERMINED
        self.exhausted: Optional[BudgetExhausted] = None

    def advance(self, quantum: int = DEFAULT_QUANTUM) -> str:
        """Pull until a LEVEL marker, ``quantum`` steps, or completion."""
        if self.state != UNDETERMINED or self.exhausted is not None:
            return self.state
        steps = 0
        try:
            while steps < quantum:
                marker = next(self._generator)
                if marker == LEVEL:
                    break
                steps += 1
                self._meter.charge()
        except StopIteration as stop:
            self.state = TRUE if stop.value else FALSE
        except BudgetExhausted as exc:
            if exc.reason != "precision":
                raise
            self.exhausted = exc
        return self.state


@dataclass(frozen=True)
class ChoicePolicy:
    """How ties between simultaneously true branches are broken."""

    mode: str = "left"
    seed: Optional[int] = None

    MODES = ("left", "right", "random")

    def __post_init__(self) -> None:
        if self.mode not in self.MODES:
            raise ValueError(f"unknown choice policy {self.mode!r}; expected one of {self.MODES}")
        if self.mode == "random" and self.seed is None:
            raise ValueError("a random choice policy needs a seed")

    @classmethod
    def left(cls) -> "ChoicePolicy":
        return cls("left")

    @classmethod
    def right(cls) -> "ChoicePolicy":
        return cls("right")

    @classmethod
    def seeded(cls, seed: int) -> "ChoicePolicy":
        return cls("random", seed)

    @classmethod
    def from_key(cls, key: str, seed: Optional[int] = None) -> "ChoicePolicy":
        if key == "random":
            return cls.seeded(0 if seed is None else seed)
        return cls(key)

    def stream(self) -> "ChoiceStream":
        return ChoiceStream(self)

    def __str__(self) -> str:
        return f"random(seed={self.seed})" if self.mode == "random" else self.mode


class ChoiceStream:
    """Stateful tie-breaker for one evaluation; deterministic per (mode, seed, history)."""

    def __init__(self, policy: ChoicePolicy) -> None:
        self.policy = policy
        self._rng = random.Random(policy.seed) if policy.mode == "random" else None

    def pick(self, candidates: Sequence[int]) -> int:
        if not candidates:
            raise ValueError("no candidate branches")
        if len(candidates) == 1:
            return candidates[0]
        if self.policy.mode == "left":
            return min(candidates)
        if self.policy.mode == "right":
            return max(candidates)
        return self._rng.choice(sorted(candidates))

    def fork(self) -> "ChoiceStream":
        """An independent stream that makes the same future picks."""
        twin = ChoiceStream(self.policy)
        if self._rng is not None:
            twin._rng.setstate(self._rng.getstate())
        return twin


ChooseObserver = Callable[[List[str], int], None]


def choose(
    branches: Sequence[LazyBool],
    stream: Optional[ChoiceStream] = None,
    budget: Optional[BudgetLike] = None,
    observe: Optional[ChooseObserver] = None,
    span: Optional[Span] = None,
    quantum: int = DEFAULT_QUANTUM,
) -> int:
    """Index of some branch that is true, found by fair interleaving.

    Raises BudgetExhausted when every branch has settled to false or run out
    of precision, or when the step budget is spent.
    """
    if len(branches) < 2:
        raise ValueError("choose needs at least two branches")
    meter = as_meter(budget)
    stream = stream or ChoicePolicy.left().stream()
    runs = [branch.start(meter) for branch in branches]
    rounds = 0
    while True:
        rounds += 1
        ready: List[int] = []
        for index, run in enumerate(runs):
            if run.state == UNDETERMINED and run.exhausted is None:
                try:
                    run.advance(quantum)
                except BudgetExhausted as exc:
                    raise exc.at(span)
            if run.state == TRUE:
                ready.append(index)
        states = [run.state for run in runs]
        if ready:
            picked = stream.pick(ready)
            logger.debug("choose settled after %d rounds: %s -> %d", rounds, ",".join(states), picked)
            if observe is not None:
                observe(states, picked)
            return picked
        if all(run.state == FALSE or run.exhausted is not None for run in runs):
            raise BudgetExhausted(
                f"no branch of choose became true ({','.join(states)})",
                span,
                reason="precision",
            )


def soft_gt(
    x: RealNum,
    p: int,
    stream: Optional[ChoiceStream] = None,
    budget: Optional[BudgetLike] = None,
) -> int:
    """Total multivalued ``x >_p 0``: 1 implies x > -2^p, 0 implies x < 2^p."""
    return choose(
        [LazyBool.compare(iota(p), x), LazyBool.compare(x, real_neg(iota(p)))],
        stream,
        budget,
    )

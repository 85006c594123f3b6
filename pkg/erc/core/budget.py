"""Evaluation fuel: step and precision bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from erc.errors import BudgetExhausted, Span

DEFAULT_MAX_STEPS = 10_000_000
DEFAULT_MIN_PRECISION = -4096
DEFAULT_MAX_DEPTH = 200


@dataclass(frozen=True)
class EvalBudget:
    """Immutable limits for one evaluation.

    ``max_steps`` bounds refinement work; ``min_precision`` is the finest
    precision any refinement may query. Running out of either is reported as
    BudgetExhausted, the finite witness of a possibly diverging test.
    """

    max_steps: int = DEFAULT_MAX_STEPS
    min_precision: int = DEFAULT_MIN_PRECISION
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self) -> None:
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.min_precision >= 0:
            raise ValueError("min_precision must be negative")
        if self.max_depth <= 0:
            raise ValueError("max_depth must be positive")

    def meter(self) -> "BudgetMeter":
        return BudgetMeter(self)


class BudgetMeter:
    """Mutable step counter bound to an EvalBudget."""

    def __init__(self, budget: EvalBudget) -> None:
        self.budget = budget
        self.steps = 0
        self.finest = 0
        self.depth = 0

    @property
    def min_precision(self) -> int:
        return self.budget.min_precision

    def charge(self, n: int = 1, span: Optional[Span] = None) -> None:
        self.steps += n
        if self.steps > self.budget.max_steps:
            raise BudgetExhausted(
                f"step budget of {self.budget.max_steps} exhausted", span, reason="steps"
            )

    def check_precision(self, p: int, span: Optional[Span] = None) -> None:
        if p < self.budget.min_precision:
            raise BudgetExhausted(
                f"precision 2^{p} below budget limit 2^{self.budget.min_precision}",
                span,
                reason="precision",
            )
        if p < self.finest:
            self.finest = p

    def enter(self, span: Optional[Span] = None) -> None:
        self.depth += 1
        if self.depth > self.budget.max_depth:
            self.depth -= 1
            raise BudgetExhausted(
                f"call depth limit {self.budget.max_depth} exceeded", span, reason="depth"
            )

    def leave(self) -> None:
        self.depth -= 1


BudgetLike = Union[EvalBudget, BudgetMeter]


def as_meter(budget: Optional[BudgetLike]) -> BudgetMeter:
    """Accept a budget or a running meter; a bare budget starts a fresh meter."""
    if budget is None:
        return EvalBudget().meter()
    if isinstance(budget, BudgetMeter):
        return budget
    return budget.meter()

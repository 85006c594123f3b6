"""Exception hierarchy for the erc toolkit.

Library code raises these; only the CLI turns them into exit codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Span:
    """A source position: file, 1-based line and column."""

    file: str = "<input>"
    line: int = 0
    column: int = 0

    @property
    def site(self) -> str:
        """Short ``file:line`` form used in traces."""
        return f"{self.file}:{self.line}"

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ErcError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1

    def __init__(self, message: str, span: Optional[Span] = None) -> None:
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


class ErcSyntaxError(ErcError):
    """Malformed ERC source, assertion or ``.vc`` text."""

    exit_code = 2


class SortError(ErcError):
    """Static check failure: sorts, Presburger restriction, parameters, returns."""

    exit_code = 3


class MissingAnnotation(ErcError):
    """A loop or function lacks an annotation needed for VC generation."""

    exit_code = 5


class UnsupportedQuantifierShape(ErcError):
    """The sampler cannot evaluate a VC with this quantifier structure."""

    exit_code = 0


class RuntimeSignal(ErcError):
    """Base for signals raised while evaluating a program."""


class BudgetExhausted(RuntimeSignal):
    """Refinement did not finish within the evaluation budget.

    This witnesses possible divergence (for instance an equality test on reals);
    it never stands for a wrong answer.
    """

    exit_code = 4

    def __init__(
        self,
        message: str,
        span: Optional[Span] = None,
        reason: str = "precision",
        sites: Optional[list[str]] = None,
    ) -> None:
        super().__init__(message, span)
        self.reason = reason
        self.sites: list[str] = list(sites or [])
        if span is not None and span.site not in self.sites:
            self.sites.append(span.site)

    def at(self, span: Optional[Span]) -> "BudgetExhausted":
        """Record an enclosing site while the signal propagates outward."""
        if span is not None:
            self.sites.append(span.site)
            if self.span is None:
                self.span = span
        return self


class IndexOutOfBounds(RuntimeSignal):
    """Array access outside the declared length."""

    exit_code = 7


class InvalidGuard(RuntimeSignal):
    """A guard or conditional test evaluated to something other than 0 or 1."""


class PreconditionFailed(RuntimeSignal):
    """A call whose arguments are exact and falsify the callee's ``pre`` annotation."""


class DivergedMarker(RuntimeSignal):
    """Explicit divergence raised by test hooks."""

    exit_code = 4

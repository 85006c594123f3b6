"""Evaluation traces: one line per multivalued or partial test, in order."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union


@dataclass(frozen=True)
class ChooseRecord:
    site: str
    states: Tuple[str, ...]
    picked: int
    # Made by code whose arguments depend on the requested precision; such calls
    # differ between runs at p and p-1 and are not paired by consistency checks.
    precision_bound: bool = False

    def line(self) -> str:
        return f"CHOOSE site={self.site} states={','.join(self.states)} picked={self.picked}"


@dataclass(frozen=True)
class CmpRecord:
    site: str
    result: int

    def line(self) -> str:
        return f"CMP site={self.site} result={self.result}"


Record = Union[ChooseRecord, CmpRecord]


@dataclass
class Trace:
    records: List[Record] = field(default_factory=list)
    min_precision: int = 0
    steps: int = 0
    result: str = ""

    def choose(self, site: str, states: List[str], picked: int, precision_bound: bool = False) -> None:
        self.records.append(ChooseRecord(site, tuple(states), picked, precision_bound))

    def compare(self, site: str, result: int) -> None:
        self.records.append(CmpRecord(site, result))

    @property
    def choices(self) -> List[ChooseRecord]:
        return [r for r in self.records if isinstance(r, ChooseRecord)]

    def choices_by_site(self) -> Dict[str, List[int]]:
        """Picks of precision-independent choose calls, grouped by site in call order."""
        grouped: Dict[str, List[int]] = {}
        for record in self.choices:
            if not record.precision_bound:
                grouped.setdefault(record.site, []).append(record.picked)
        return grouped

    def lines(self) -> List[str]:
        out = [record.line() for record in self.records]
        out.append(f"PRECISION min={self.min_precision} steps={self.steps}")
        out.append(f"RESULT {self.result}")
        return out

    def serialize(self) -> str:
        return "\n".join(self.lines()) + "\n"

"""Comparison of generated VCs with reference ``.vc`` files."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union

from erc.lang.lexer import read_source
from erc.verify.fparser import VcText, parse_vc_text
from erc.verify.normalize import alpha_equivalent, canonical_text
from erc.verify.vcgen import VcSet

logger = logging.getLogger(__name__)

_GOLDEN_NAME = re.compile(r"^vc_(\d+)\.vc$")


@dataclass
class GoldenReport:
    function: str
    matched: List[str] = field(default_factory=list)
    mismatched: List[Tuple[str, str, str]] = field(default_factory=list)
    missing: List[str] = field(default_factory=list)
    extra: List[str] = field(default_factory=list)
    skipped: bool = False

    @property
    def ok(self) -> bool:
        return not (self.mismatched or self.missing or self.extra)

    def summary(self) -> str:
        if self.skipped:
            return f"{self.function}: no reference VCs"
        parts = [f"{self.function}: {len(self.matched)} matched"]
        if self.mismatched:
            parts.append(f"{len(self.mismatched)} differ ({', '.join(m[0] for m in self.mismatched)})")
        if self.missing:
            parts.append(f"{len(self.missing)} not generated ({', '.join(self.missing)})")
        if self.extra:
            parts.append(f"{len(self.extra)} without reference ({', '.join(self.extra)})")
        return ", ".join(parts)


def load_goldens(directory: Union[str, Path]) -> List[VcText]:
    """Reference VCs ``vc_0.vc, vc_1.vc, ...`` in numeric order."""
    directory = Path(directory)
    files = []
    for path in directory.iterdir():
        match = _GOLDEN_NAME.match(path.name)
        if match:
            files.append((int(match.group(1)), path))
    return [parse_vc_text(read_source(path), path.stem) for _, path in sorted(files)]


def check_goldens(vcset: VcSet, directory: Union[str, Path]) -> GoldenReport:
    """Match generated VCs to references by index, up to alpha-equivalence."""
    report = GoldenReport(vcset.function)
    directory = Path(directory)
    if not directory.is_dir():
        logger.warning("no reference VCs for %s in %s", vcset.function, directory)
        report.skipped = True
        return report
    goldens = {g.name: g for g in load_goldens(directory)}
    for vc in vcset.vcs:
        golden = goldens.pop(vc.name, None)
        if golden is None:
            report.extra.append(vc.name)
        elif alpha_equivalent(vc.formula, golden.formula):
            report.matched.append(vc.name)
        else:
            report.mismatched.append((vc.name, canonical_text(vc.formula), canonical_text(golden.formula)))
            logger.debug("%s differs from %s", vc.name, directory / f"{vc.name}.vc")
    report.missing.extend(sorted(goldens, key=lambda n: int(n.split("_")[1])))
    return report

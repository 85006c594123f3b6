"""Rational polynomials used as the harness-bound function ``f``.

The same object serves the evaluator, which needs a RealNum valued function,
and the VC sampler, which evaluates exactly and counts roots with a Sturm
sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

from erc.core.real import RealNum, real_polynomial
from erc.lang.ast import REAL, Signature

Rational = Union[int, Fraction]

F_SIGNATURE = Signature((REAL,), REAL)


def _trim(coefficients: Sequence[Fraction]) -> List[Fraction]:
    out = list(coefficients)
    while out and out[-1] == 0:
        out.pop()
    return out


def _remainder(u: Sequence[Fraction], v: Sequence[Fraction]) -> List[Fraction]:
    u = _trim(u)
    v = _trim(v)
    while len(u) >= len(v) and u:
        factor = u[-1] / v[-1]
        shift = len(u) - len(v)
        for i, c in enumerate(v):
            u[shift + i] -= factor * c
        u = _trim(u)
    return u


def _horner(coefficients: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coefficients):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class Polynomial:
    """``sum(c[k] * x**k)``; coefficients are listed constant term first."""

    name: str
    coefficients: Tuple[Fraction, ...]
    description: str = ""

    @classmethod
    def of(cls, name: str, *coefficients: Rational, description: str = "") -> "Polynomial":
        return cls(name, tuple(Fraction(c) for c in coefficients), description)

    @property
    def degree(self) -> int:
        return len(_trim(self.coefficients)) - 1

    def at(self, x: Rational) -> Fraction:
        return _horner(self.coefficients, Fraction(x))

    def __call__(self, x: RealNum) -> RealNum:
        return real_polynomial(list(reversed(self.coefficients)), x)

    def derivative(self) -> List[Fraction]:
        return [k * c for k, c in enumerate(self.coefficients)][1:]

    def sturm_sequence(self) -> List[List[Fraction]]:
        chain = [_trim(self.coefficients), _trim(self.derivative())]
        while chain[-1]:
            chain.append([-c for c in _remainder(chain[-2], chain[-1])])
        return chain[:-1]

    def _variations(self, chain: Sequence[Sequence[Fraction]], x: Fraction) -> int:
        signs = [v > 0 for v in (_horner(p, x) for p in chain) if v != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def count_roots(self, a: Rational, b: Rational) -> int:
        """Distinct real roots in the closed interval ``[a, b]``."""
        a, b = Fraction(a), Fraction(b)
        if a > b:
            return 0
        if not _trim(self.coefficients):
            raise ValueError("the zero polynomial has infinitely many roots")
        chain = self.sturm_sequence()
        # variations are right-continuous, so this counts (a, b]
        count = self._variations(chain, a) - self._variations(chain, b)
        return count + (1 if self.at(a) == 0 else 0)

    def __str__(self) -> str:
        return self.description or self.name


TEST_FUNCTIONS: Dict[str, Polynomial] = {
    p.name: p
    for p in (
        Polynomial.of("linear_2x_minus_1", -1, 2, description="2x - 1"),
        Polynomial.of("affine_x_minus_third", Fraction(-1, 3), 1, description="x - 1/3"),
        Polynomial.of(
            "cubic",
            Fraction(-1, 8),
            Fraction(-1, 2),
            0,
            1,
            description="x^3 - x/2 - 1/8",
        ),
        Polynomial.of("shifted_half", Fraction(-1, 2), 1, description="x - 1/2"),
    )
}


def bound_function(name: str) -> Polynomial:
    try:
        return TEST_FUNCTIONS[name]
    except KeyError:
        raise KeyError(f"unknown test function {name!r}; choose from {sorted(TEST_FUNCTIONS)}") from None

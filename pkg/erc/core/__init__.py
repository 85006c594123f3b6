"""Exact dyadic arithmetic, lazily refined reals and multivalued tests."""

from erc.core.budget import EvalBudget, BudgetMeter
from erc.core.choice import ChoicePolicy, ChoiceStream, LazyBool, choose, soft_gt
from erc.core.dyadic import Dyadic
from erc.core.interval import DyadicInterval
from erc.core.real import (
    RealNum,
    approx,
    gt_partial,
    iota,
    limit,
    real_binop,
    real_from_fraction,
    real_from_integer,
    real_neg,
    real_polynomial,
)

__all__ = [
    "BudgetMeter",
    "ChoicePolicy",
    "ChoiceStream",
    "Dyadic",
    "DyadicInterval",
    "EvalBudget",
    "LazyBool",
    "RealNum",
    "approx",
    "choose",
    "gt_partial",
    "iota",
    "limit",
    "real_binop",
    "real_from_fraction",
    "real_from_integer",
    "real_neg",
    "real_polynomial",
    "soft_gt",
]

from fractions import Fraction

import pytest

from erc.core.budget import EvalBudget
from erc.core.choice import (
    DEFAULT_QUANTUM,
    ChoicePolicy,
    LazyBool,
    choose,
    precision_schedule,
    soft_gt,
)
from erc.core.real import real_from_fraction
from erc.errors import BudgetExhausted


def test_precision_schedule():
    assert list(precision_schedule(-10)) == [0, -1, -2, -4, -8, -10]
    assert list(precision_schedule(-8)) == [0, -1, -2, -4, -8]


def test_policy_validation():
    with pytest.raises(ValueError):
        ChoicePolicy("middle")
    with pytest.raises(ValueError):
        ChoicePolicy("random")
    assert str(ChoicePolicy.seeded(7)) == "random(seed=7)"
    assert ChoicePolicy.from_key("random").seed == 0
    assert ChoicePolicy.from_key("right").mode == "right"


def test_stream_picks():
    assert ChoicePolicy.left().stream().pick([2, 0, 1]) == 0
    assert ChoicePolicy.right().stream().pick([2, 0, 1]) == 2
    assert ChoicePolicy.left().stream().pick([4]) == 4
    with pytest.raises(ValueError):
        ChoicePolicy.left().stream().pick([])


def test_seeded_stream_is_reproducible():
    first = ChoicePolicy.seeded(3).stream()
    second = ChoicePolicy.seeded(3).stream()
    assert [first.pick([0, 1, 2]) for _ in range(20)] == [second.pick([0, 1, 2]) for _ in range(20)]


def test_lazy_bool_evaluate():
    assert LazyBool.constant(True).evaluate()
    assert not LazyBool.after(5, False).evaluate()
    one, two = real_from_fraction(1), real_from_fraction(2)
    assert LazyBool.compare(two, one).evaluate()
    assert not LazyBool.compare(one, two).evaluate()


def test_conjunction_short_circuits():
    assert not LazyBool.constant(False).conjunction(LazyBool.diverging()).evaluate()
    assert LazyBool.constant(True).conjunction(LazyBool.after(3)).evaluate()


def test_conditional():
    test = LazyBool.constant(False)
    assert test.conditional(LazyBool.diverging(), LazyBool.constant(True)).evaluate()


def test_choose_needs_two_branches():
    with pytest.raises(ValueError):
        choose([LazyBool.constant(True)])


def test_choose_is_fair_to_slow_branches():
    budget = EvalBudget(max_steps=100_000)
    index = choose([LazyBool.diverging(), LazyBool.after(1000)], budget=budget, quantum=16)
    assert index == 1


@pytest.mark.parametrize("k", [0, 1, 17, 1000, 10_000])
def test_choose_progress(k):
    budget = EvalBudget(max_steps=2 * k + 4 * DEFAULT_QUANTUM)
    assert choose([LazyBool.after(k), LazyBool.diverging()], budget=budget) == 0
    assert choose([LazyBool.diverging(), LazyBool.after(k)], budget=budget) == 1


def test_choose_tie_breaking():
    branches = [LazyBool.constant(True), LazyBool.constant(True)]
    assert choose(branches, ChoicePolicy.left().stream()) == 0
    assert choose(branches, ChoicePolicy.right().stream()) == 1
    seen = {choose(branches, ChoicePolicy.seeded(seed).stream()) for seed in range(32)}
    assert seen == {0, 1}


def test_choose_observer_sees_states():
    seen = []
    choose(
        [LazyBool.constant(False), LazyBool.constant(True)],
        observe=lambda states, picked: seen.append((tuple(states), picked)),
    )
    assert seen == [(("F", "T"), 1)]


def test_choose_all_false_exhausts():
    with pytest.raises(BudgetExhausted):
        choose([LazyBool.constant(False), LazyBool.constant(False)])


def test_choose_skips_branch_comparing_equal_reals():
    x = real_from_fraction(Fraction(1, 3))
    budget = EvalBudget(min_precision=-64)
    index = choose([LazyBool.compare(x, x), LazyBool.constant(True)], budget=budget)
    assert index == 1


def test_diverging_branches_exhaust_step_budget():
    with pytest.raises(BudgetExhausted) as info:
        choose([LazyBool.diverging(), LazyBool.diverging()], budget=EvalBudget(max_steps=1000))
    assert info.value.reason == "steps"


def test_soft_gt():
    p = -4
    assert soft_gt(real_from_fraction(1), p) == 1
    assert soft_gt(real_from_fraction(-1), p) == 0
    # within 2^p of zero both answers are allowed
    near = real_from_fraction(Fraction(1, 64))
    assert soft_gt(near, p, ChoicePolicy.left().stream()) == 0
    assert soft_gt(near, p, ChoicePolicy.right().stream()) == 1

from dataclasses import replace
from fractions import Fraction

import pytest

from erc.core.choice import ChoicePolicy
from erc.corpus.cases import CASES, CorpusCase, round_input, round_oracle
from erc.corpus.harness import (
    CaseConfig,
    case_config,
    load_manifest,
    run_case,
    run_corpus,
    run_entry,
    tolerance,
)
from erc.errors import ErcError


def test_tolerance():
    assert tolerance(None, 0) == 0
    assert tolerance(-8, 0, 8) == Fraction(2) ** -8 + Fraction(2) ** -15
    assert tolerance(-20, 5, 8) == Fraction(2) ** -15 + Fraction(2) ** -27


def test_manifest(corpus_dir):
    manifest = load_manifest(corpus_dir)
    assert manifest["guard_bits"] == 8
    assert set(manifest["cases"]) == set(CASES)
    gauss = case_config(manifest, "gauss")
    assert gauss.slack == 5 and list(gauss.precisions) == [-20]


def test_malformed_manifest(tmp_path):
    (tmp_path / "corpus.json").write_text("{\"cases\": ", encoding="utf-8")
    with pytest.raises(ErcError, match="cannot read"):
        load_manifest(tmp_path)


def test_case_config_defaults_and_errors():
    config = case_config({"cases": {"x": {"seed": 1, "count": 3}}}, "x")
    assert config == CaseConfig(seed=1, count=3, quick_count=3, precisions=[None], slack=0)
    with pytest.raises(ErcError, match="no case"):
        case_config({"cases": {}}, "round")


@pytest.mark.parametrize("name", ["round", "pivot", "trisection", "exp", "exp_any", "gauss"])
def test_quick_case_passes(settings, corpus_dir, name):
    config = case_config(load_manifest(corpus_dir), name)
    result = run_case(CASES[name], config, settings, quick=True)
    assert result.ok, result.failures
    assert result.runs == config.quick_count * len(config.precisions)
    assert result.passed + result.precondition_violations == result.runs


def test_run_entry_single_inputs(settings):
    x = Fraction(5, 2)
    assert run_entry(CASES["round"], [x], None, ChoicePolicy.left(), settings).value == 2
    assert run_entry(CASES["round"], [x], None, ChoicePolicy.right(), settings).value == 3
    M = [Fraction(0), Fraction(0), Fraction(3)]
    assert run_entry(CASES["pivot"], [3, M], None, ChoicePolicy.left(), settings).value == 2


def test_bisection_is_expected_to_diverge(settings, corpus_dir):
    config = case_config(load_manifest(corpus_dir), "bisection")
    cheap = replace(settings, max_steps=200_000, min_precision=-64)
    result = run_case(CASES["bisection"], config, cheap, quick=True)
    assert result.ok and result.passed == result.runs == 1


def test_random_policy_runs_are_checked(settings, corpus_dir):
    config = CaseConfig(seed=3, count=8, quick_count=8, precisions=[None])
    seeded = replace(settings, policy_key="random", seed=4, seed_set=True)
    result = run_case(CASES["round"], config, seeded)
    assert result.ok and result.passed == 8


def test_missing_annotations_fail_the_case(settings):
    case = CorpusCase("round_pre", "round.erc", "Round", round_input, round_oracle, ("pre",))
    result = run_case(case, CaseConfig(seed=1, count=2, quick_count=2, precisions=[None]), settings)
    assert not result.ok
    assert any("lacks annotation(s): pre" in f for f in result.failures)


def test_unloadable_case(settings):
    case = CorpusCase("ghost", "ghost.erc", "Ghost", round_input, round_oracle)
    result = run_case(case, CaseConfig(seed=1, count=1, quick_count=1, precisions=[None]), settings)
    assert result.runs == 0
    assert result.failures and "cannot load ghost.erc" in result.failures[0]


def test_unknown_case_name(settings):
    with pytest.raises(ErcError, match="unknown corpus case"):
        run_corpus(settings, ["nope"])


@pytest.mark.slow
def test_full_corpus(settings):
    results = run_corpus(settings)
    assert [r.name for r in results] == list(CASES)
    assert all(r.ok for r in results), [f for r in results for f in r.failures]

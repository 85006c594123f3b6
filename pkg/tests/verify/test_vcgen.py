import shutil

import pytest

from erc.corpus.functions import F_SIGNATURE
from erc.errors import MissingAnnotation
from erc.lang import load_open_program
from erc.lang.ast import REAL
from erc.verify.fparser import parse_formula
from erc.verify.goldens import check_goldens
from erc.verify.normalize import alpha_equivalent, canonical_text
from erc.verify.vcgen import generate_all, generate_vcs


@pytest.fixture
def trisection_vcs(corpus_dir):
    program, externals = load_open_program(corpus_dir / "trisection.erc", F_SIGNATURE)
    return generate_vcs(program, program.function("Trisection"), externals)


def test_trisection_vc_origins(trisection_vcs):
    assert [vc.name for vc in trisection_vcs] == [f"vc_{k}" for k in range(5)]
    assert [vc.origin for vc in trisection_vcs] == ["preservation"] * 3 + ["exit", "top"]
    discharged = {vc.origin for vc, _ in trisection_vcs.discharged}
    assert {"defined", "bound"} <= discharged


def test_choose_branches_are_guarded(trisection_vcs):
    vcs = trisection_vcs.vcs
    assert not vcs[0].guards
    assert len(vcs[1].guards) == 1 and len(vcs[2].guards) == 1
    assert all(span.file == "trisection.erc" for span in (vc.span for vc in vcs))


def test_trisection_matches_goldens(trisection_vcs, corpus_dir):
    report = check_goldens(trisection_vcs, corpus_dir / "goldens" / "trisection")
    assert report.ok, report.summary()
    assert report.matched == [f"vc_{k}" for k in range(5)]


def test_golden_differences_are_reported(trisection_vcs, corpus_dir, tmp_path):
    golden_dir = tmp_path / "trisection"
    shutil.copytree(corpus_dir / "goldens" / "trisection", golden_dir)
    (golden_dir / "vc_1.vc").write_text("var x: REAL\nvc: x > 0\n", encoding="utf-8")
    (golden_dir / "vc_4.vc").unlink()
    shutil.copy(golden_dir / "vc_3.vc", golden_dir / "vc_5.vc")
    report = check_goldens(trisection_vcs, golden_dir)
    assert not report.ok
    assert [m[0] for m in report.mismatched] == ["vc_1"]
    assert report.extra == ["vc_4"]
    assert report.missing == ["vc_5"]
    assert "1 differ" in report.summary()


def test_missing_golden_directory_is_skipped(trisection_vcs, tmp_path):
    report = check_goldens(trisection_vcs, tmp_path / "nowhere")
    assert report.skipped and report.ok


@pytest.mark.parametrize("name, function", [("pivot.erc", "Pivot"), ("round.erc", "Round")])
def test_annotated_corpus_functions(load_corpus, name, function):
    vcsets = generate_all(load_corpus(name))
    assert [s.function for s in vcsets] == [function]
    assert len(vcsets[0]) > 0


def test_missing_loop_invariant(corpus_dir):
    program, externals = load_open_program(corpus_dir / "bisection.erc", F_SIGNATURE)
    with pytest.raises(MissingAnnotation, match="no invariant") as info:
        generate_vcs(program, program.function("Bisection"), externals)
    assert info.value.exit_code == 5


def test_missing_postcondition(load_corpus):
    program = load_corpus("exp.erc")
    assert generate_all(program) == []
    with pytest.raises(MissingAnnotation, match="no postcondition"):
        generate_vcs(program, program.function("Exp"))


ENV = {"x": REAL, "y": REAL, "a": REAL, "b": REAL}


@pytest.mark.parametrize(
    "left, right",
    [
        ("x > y", "a > b"),
        ("x > 0 and y > 0", "y > 0 and x > 0"),
        ("x > 0 => y > 0 and x > 0", "x > 0 => y > 0"),
        ("not (x > y)", "y >= x"),
        ("x < y", "y > x"),
    ],
)
def test_alpha_equivalent(left, right):
    assert alpha_equivalent(parse_formula(left, ENV), parse_formula(right, ENV))


@pytest.mark.parametrize("left, right", [("x > y", "x >= y"), ("x > 0 => y > 0", "x > 0 => y >= 0")])
def test_not_alpha_equivalent(left, right):
    assert not alpha_equivalent(parse_formula(left, ENV), parse_formula(right, ENV))


def test_canonical_text_hides_names():
    text = canonical_text(parse_formula("x > y", ENV))
    assert "x" not in text and "y" not in text

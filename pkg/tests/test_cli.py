import json
from fractions import Fraction

import pytest

from erc.cli import main, parse_value

pytestmark = pytest.mark.usefixtures("clean_env")


def run_cli(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    out, err = capsys.readouterr()
    return info.value.code, out, err


def test_parse_value():
    assert parse_value("5/2") == Fraction(5, 2)
    assert parse_value("-3") == -3
    assert parse_value("[0, 1/2, [1, 2]]")[2] == [1, 2]
    assert parse_value("[]") == []


def test_no_command(capsys):
    code, out, _ = run_cli([], capsys)
    assert code == 1
    assert "usage: erc" in out


def test_run_round(corpus_dir, capsys):
    source = str(corpus_dir / "round.erc")
    assert run_cli(["run", source, "--entry", "Round", "--arg", "x=5/2"], capsys)[:2] == (0, "2\n")
    assert run_cli(["--policy", "right", "run", source, "--entry", "Round", "--arg", "x=5/2"], capsys)[:2] == (0, "3\n")


def test_run_with_trace(corpus_dir, capsys):
    code, out, _ = run_cli(
        ["run", str(corpus_dir / "round.erc"), "--entry", "Round", "--arg", "x=5/2", "--trace"], capsys
    )
    assert code == 0
    assert "CHOOSE" in out
    assert out.endswith("RESULT 2\n")


def test_run_trisection(corpus_dir, capsys):
    source = str(corpus_dir / "trisection.erc")
    code, out, _ = run_cli(["run", source, "--entry", "Trisection", "-p", "-8", "--fn", "f=cubic"], capsys)
    assert code == 0 and out.startswith("[")
    code, _, err = run_cli(["run", source, "--entry", "Trisection", "-p", "-8"], capsys)
    assert code == 1 and "no binding for f" in err


def test_run_reports_exit_codes(corpus_dir, tmp_path, capsys):
    broken = tmp_path / "broken.erc"
    broken.write_text("INTEGER F(INTEGER n) {\n  RETURN n\n}\n", encoding="utf-8")
    assert run_cli(["run", str(broken), "--entry", "F", "--arg", "n=1"], capsys)[0] == 2
    code, _, err = run_cli(
        ["--max-steps", "2000", "run", str(corpus_dir / "bisection.erc"), "--entry", "Bisection", "-p", "-10",
         "--fn", "f=shifted_half"],
        capsys,
    )
    assert code == 4 and "error:" in err



def test_undecodable_sources_are_syntax_errors(tmp_path, capsys):
    program = tmp_path / "bad.erc"
    program.write_bytes(b"INTEGER F(INTEGER n) { RETURN \xff; }\n")
    code, _, err = run_cli(["run", str(program), "--entry", "F", "--arg", "n=1"], capsys)
    assert code == 2
    assert "bad.erc:1:" in err and "not valid UTF-8" in err
    vc = tmp_path / "bad.vc"
    vc.write_bytes(b"var x: REAL\nvc: x > \xfe0\n")
    code, _, err = run_cli(["check", str(vc)], capsys)
    assert code == 2 and "bad.vc:2:" in err


def test_bad_argument_value(corpus_dir, capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", str(corpus_dir / "round.erc"), "--entry", "Round", "--arg", "x=abc"])
    assert info.value.code == 2


def test_vc_with_goldens(corpus_dir, tmp_path, capsys):
    out_dir = tmp_path / "vcs"
    code, out, _ = run_cli(
        ["vc", str(corpus_dir / "trisection.erc"), "--out", str(out_dir), "--check-goldens"], capsys
    )
    assert code == 0
    assert "Trisection: 5 VC(s)" in out
    assert "Trisection: 5 matched" in out
    assert len(json.loads((out_dir / "index.json").read_text(encoding="utf-8"))) == 5


def test_vc_missing_annotation(corpus_dir, tmp_path, capsys):
    code, _, err = run_cli(["vc", str(corpus_dir / "bisection.erc"), "--out", str(tmp_path)], capsys)
    assert code == 5
    assert "no invariant" in err


def test_vc_unknown_function(corpus_dir, tmp_path, capsys):
    code, _, err = run_cli(
        ["vc", str(corpus_dir / "trisection.erc"), "--function", "Nope", "--out", str(tmp_path)], capsys
    )
    assert code == 1 and "no function named" in err


def test_check_sources_and_vc_files(corpus_dir, tmp_path, capsys):
    code, out, _ = run_cli(["check", str(corpus_dir / "trisection.erc"), "--samples", "300"], capsys)
    assert code == 0
    assert "5 VCs, 0 counterexample(s)" in out

    bad = tmp_path / "bad.vc"
    bad.write_text("var x: REAL\nvc: x > 0 => x > 1\n", encoding="utf-8")
    code, out, _ = run_cli(["check", str(bad), "--samples", "2000"], capsys)
    assert code == 6
    assert "bad.vc: counterexample" in out


def test_check_unsupported_shape(tmp_path, capsys):
    vc = tmp_path / "real_exists.vc"
    vc.write_text("var x: REAL\nvc: exists y: REAL. y > x\n", encoding="utf-8")
    code, out, _ = run_cli(["check", str(vc)], capsys)
    assert code == 0
    assert "unsupported" in out


def test_check_mutant(corpus_dir, capsys):
    code, _, _ = run_cli(
        ["check", str(corpus_dir / "trisection.erc"), "--mutant", "invariant_weakened", "--samples", "2000"], capsys
    )
    assert code == 6


def test_check_inapplicable_mutant(corpus_dir, capsys):
    code, _, err = run_cli(["check", str(corpus_dir / "pivot.erc"), "--mutant", "epsilon_overstated"], capsys)
    assert code == 1 and "epsilon" in err


def test_corpus_quick_case(capsys):
    code, out, _ = run_cli(["corpus", "--case", "round", "--quick"], capsys)
    assert code == 0
    assert "round: 12/12 passed" in out
    assert "1/1 case(s) passed" in out


def test_config(capsys):
    code, out, _ = run_cli(["config"], capsys)
    assert code == 0
    assert "ok: configuration is valid" in out


def test_config_errors(monkeypatch, capsys):
    monkeypatch.setenv("ERC_BUDGET_STEPS", "0")
    code, out, _ = run_cli(["config"], capsys)
    assert code == 1 and "ERC_BUDGET_STEPS must be positive" in out
    code, out, _ = run_cli(["corpus", "--quick"], capsys)
    assert code == 1 and "erc config" in out


def test_unparsable_setting(monkeypatch, capsys):
    monkeypatch.setenv("ERC_SEED", "abc")
    code, out, _ = run_cli(["config"], capsys)
    assert code == 1 and "ERC_SEED must be an integer" in out

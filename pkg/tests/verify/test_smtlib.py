import json

from erc.corpus.functions import F_SIGNATURE
from erc.lang import load_open_program
from erc.lang.ast import INTEGER, REAL
from erc.verify.fparser import parse_formula, parse_vc_text
from erc.verify.normalize import alpha_equivalent
from erc.verify.smtlib import emit_solver, to_smtlib, write_vc_files
from erc.verify.vcgen import generate_vcs


def test_script_shape():
    formula = parse_formula("x > 0 => x + iota(p) > 0", {"x": REAL, "p": INTEGER})
    script = to_smtlib(formula)
    assert script.startswith("(set-logic UFNIRA)")
    assert "(declare-fun x () Real)" in script
    assert "(declare-fun p () Int)" in script
    assert "(assert" in script
    assert script.rstrip().endswith("(check-sat)")


def test_function_symbols_are_declared():
    formula = parse_formula("f(x) > 0 or 0 >= f(x)", {"x": REAL, "f": "REAL->REAL"})
    assert "(declare-fun f (Real) Real)" in to_smtlib(formula)


def test_write_vc_files(corpus_dir, tmp_path):
    program, externals = load_open_program(corpus_dir / "trisection.erc", F_SIGNATURE)
    vcset = generate_vcs(program, program.function("Trisection"), externals)
    written = write_vc_files([vcset], tmp_path)
    assert [p.name for p in written] == [f"Trisection_vc{k}.smt2" for k in range(5)]
    index = json.loads((tmp_path / "index.json").read_text(encoding="utf-8"))
    assert [entry["origin"] for entry in index] == [vc.origin for vc in vcset]
    for vc, path in zip(vcset, written):
        text = path.with_suffix(".vc").read_text(encoding="utf-8")
        assert text.startswith(f"// Trisection {vc.name}:")
        assert alpha_equivalent(parse_vc_text(text, path.stem).formula, vc.formula)
        assert path.read_text(encoding="utf-8") == emit_solver(vc)

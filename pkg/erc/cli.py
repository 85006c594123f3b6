"""CLI entry point for erc-toolkit."""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from erc import __version__
from erc.config import Settings, load_settings, print_config_status
from erc.corpus.functions import F_SIGNATURE, Polynomial, bound_function
from erc.corpus.harness import run_corpus
from erc.errors import ErcError, UnsupportedQuantifierShape
from erc.lang import load_open_program, read_source
from erc.lang.evaluator import evaluate
from erc.verify.fparser import parse_vc_text
from erc.verify.goldens import check_goldens
from erc.verify.sampler import MUTANTS, SampleReport, mutate_vcset, sample_check
from erc.verify.smtlib import write_vc_files
from erc.verify.vcgen import VcSet, generate_all, generate_vcs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_COUNTEREXAMPLE = 6


def _split_items(text: str) -> List[str]:
    items, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "," and depth == 0:
            items.append(text[start:i])
            start = i + 1
    items.append(text[start:])
    return items


def parse_value(text: str) -> Any:
    """An exact argument: ``5/2``, ``-3``, ``0.75`` or a bracketed list such as ``[0,1/2,1]``."""
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise argparse.ArgumentTypeError(f"unbalanced brackets in {text!r}")
        inner = text[1:-1]
        return [parse_value(item) for item in _split_items(inner)] if inner.strip() else []
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    return int(value) if value.denominator == 1 else value


def _named_value(text: str) -> Tuple[str, Any]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return name.strip(), parse_value(value)


def _function_binding(text: str) -> Tuple[str, Polynomial]:
    name, sep, key = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=KEY, got {text!r}")
    try:
        return name.strip(), bound_function(key.strip())
    except KeyError as exc:
        raise argparse.ArgumentTypeError(exc.args[0]) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erc",
        description="Exact real computation: run ERC programs, generate and check their VCs",
    )
    parser.add_argument(
        "-V", "--version",
        action="version",
        version=f"erc-toolkit {__version__}",
    )
    parser.add_argument(
        "--env",
        default=None,
        help="Path to .env file (default: .env in current directory)",
    )
    parser.add_argument("--policy", choices=("left", "right", "random"), default=None, help="Choice policy")
    parser.add_argument("--seed", type=int, default=None, help="Seed of the random choice policy and the sampler")
    parser.add_argument("--max-steps", type=int, default=None, help="Evaluation step budget")
    parser.add_argument("--min-precision", type=int, default=None, help="Finest precision a test may query")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    run_parser = subparsers.add_parser("run", help="Evaluate a function")
    run_parser.add_argument("file", help="ERC source file")
    run_parser.add_argument("--entry", required=True, help="Function to evaluate")
    run_parser.add_argument(
        "--arg", dest="args", action="append", type=_named_value, default=[],
        help="Argument NAME=VALUE; values are exact rationals or [a,b,...] arrays",
    )
    run_parser.add_argument("-p", "--precision", type=int, default=None, help="Output precision p")
    run_parser.add_argument(
        "--fn", action="append", type=_function_binding, default=[],
        help="Bind an external function, e.g. f=linear_2x_minus_1",
    )
    run_parser.add_argument("--trace", action="store_true", help="Print the evaluation trace")

    vc_parser = subparsers.add_parser("vc", help="Generate verification conditions")
    vc_parser.add_argument("file", help="Annotated ERC source file")
    vc_parser.add_argument("--function", default=None, help="Only this function")
    vc_parser.add_argument("--out", default=None, help="Output directory (default: ERC_OUTPUT_DIR)")
    vc_parser.add_argument(
        "--check-goldens", action="store_true",
        help="Compare with goldens/<function>/vc_<k>.vc next to the source",
    )

    check_parser = subparsers.add_parser("check", help="Search VCs for counterexamples")
    check_parser.add_argument("files", nargs="+", help="ERC sources or .vc files")
    check_parser.add_argument("--samples", type=int, default=None, help="Samples per VC (default: ERC_SAMPLES)")
    check_parser.add_argument(
        "--fn", action="append", type=_function_binding, default=[],
        help="Restrict a function symbol to one test function, e.g. f=cubic",
    )
    check_parser.add_argument(
        "--mutant", choices=sorted(MUTANTS), default=None,
        help="Check a seeded annotation mistake instead of the VCs themselves",
    )

    corpus_parser = subparsers.add_parser("corpus", help="Run the corpus against its oracles")
    corpus_parser.add_argument("--case", dest="cases", action="append", default=None, help="Only this case")
    corpus_parser.add_argument("--quick", action="store_true", help="Reduced run counts")

    subparsers.add_parser("config", help="Validate configuration")
    return parser


def _apply_overrides(settings: Settings, args: argparse.Namespace) -> None:
    if args.policy is not None:
        settings.policy_key = args.policy
    if args.seed is not None:
        settings.seed = args.seed
        settings.seed_set = True
    if args.max_steps is not None:
        settings.max_steps = args.max_steps
    if args.min_precision is not None:
        settings.min_precision = args.min_precision


def _setup_logging(settings: Settings, verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    program, externals = load_open_program(args.file, F_SIGNATURE)
    bindings: Dict[str, Polynomial] = dict(args.fn)
    unbound = [name for name in externals if name not in bindings]
    if unbound:
        raise ErcError(f"no binding for {', '.join(unbound)}; pass --fn {unbound[0]}=KEY")
    result = evaluate(
        program,
        args.entry,
        dict(args.args),
        args.precision,
        settings.policy(),
        settings.budget(),
        bindings,
    )
    if args.trace:
        print(result.trace.serialize(), end="")
    else:
        print(result.text)
    return EXIT_OK


def _vcsets(path: Path, function: Optional[str] = None) -> List[VcSet]:
    program, externals = load_open_program(path, F_SIGNATURE)
    if function is None:
        return generate_all(program, externals)
    try:
        fn = program.function(function)
    except KeyError:
        raise ErcError(f"no function named '{function}' in {path}") from None
    return [generate_vcs(program, fn, externals)]


def cmd_vc(args: argparse.Namespace, settings: Settings) -> int:
    source = Path(args.file)
    vcsets = _vcsets(source, args.function)
    out_dir = Path(args.out or settings.output_dir)
    written = write_vc_files(vcsets, out_dir)
    for vcset in vcsets:
        print(f"{vcset.function}: {len(vcset)} VC(s), {len(vcset.discharged)} discharged")
        for vc in vcset.vcs:
            print(f"  {vc.name} {vc.origin} {vc.span}")
        for vc, reason in vcset.discharged:
            print(f"  - {vc.origin} {vc.span}: {reason}")
    print(f"wrote {len(written)} VC file(s) to {out_dir}")

    if not args.check_goldens:
        return EXIT_OK
    status = EXIT_OK
    for vcset in vcsets:
        report = check_goldens(vcset, source.parent / "goldens" / vcset.function.lower())
        print(report.summary())
        for name, generated, golden in report.mismatched:
            print(f"  {name}\n    generated: {generated}\n    reference: {golden}")
        if not report.skipped and not report.ok:
            status = EXIT_FAILURE
    return status


def _check_targets(args: argparse.Namespace) -> List[Tuple[str, Any]]:
    targets: List[Tuple[str, Any]] = []
    for file in args.files:
        path = Path(file)
        if path.suffix == ".vc":
            vc_text = parse_vc_text(read_source(path), path.name)
            targets.append((path.name, vc_text.formula))
            continue
        for vcset in _vcsets(path):
            if args.mutant is not None:
                vcset = mutate_vcset(vcset, args.mutant)
            targets.extend((f"{vcset.function} {vc.name}", vc) for vc in vcset.vcs)
    return targets


def cmd_check(args: argparse.Namespace, settings: Settings) -> int:
    samples = args.samples if args.samples is not None else settings.samples
    functions: Optional[Sequence[Polynomial]] = [poly for _, poly in args.fn] or None
    try:
        targets = _check_targets(args)
    except ValueError as exc:
        raise ErcError(str(exc)) from None

    reports: List[SampleReport] = []
    unsupported: List[str] = []
    for label, vc in targets:
        try:
            report = sample_check(vc, samples, settings.seed, functions)
        except UnsupportedQuantifierShape as exc:
            unsupported.append(label)
            print(f"{label}: unsupported, {exc.message}")
            continue
        report.name = label
        reports.append(report)
        print(report.summary())

    refuted = [r for r in reports if not r.ok]
    print(f"{len(targets)} VCs, {len(refuted)} counterexample(s), {len(unsupported)} unsupported")
    return EXIT_COUNTEREXAMPLE if refuted else EXIT_OK


def cmd_corpus(args: argparse.Namespace, settings: Settings) -> int:
    results = run_corpus(settings, args.cases, quick=args.quick)
    for result in results:
        print(result.summary())
        for failure in result.failures:
            print(f"  FAIL {failure}")
    failed = sum(1 for r in results if not r.ok)
    print(f"{len(results) - failed}/{len(results)} case(s) passed")
    return EXIT_FAILURE if failed else EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "vc": cmd_vc,
    "check": cmd_check,
    "corpus": cmd_corpus,
}


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        sys.exit(EXIT_FAILURE)

    try:
        settings = load_settings(args.env)
    except ValueError as exc:
        print(f"error: {exc}")
        sys.exit(EXIT_FAILURE)
    _apply_overrides(settings, args)
    _setup_logging(settings, args.verbose)

    if args.command == "config":
        print_config_status(settings)
        sys.exit(EXIT_FAILURE if settings.has_errors else EXIT_OK)

    errors = [issue for issue in settings.validate() if issue.startswith("error:")]
    if errors:
        print("\n".join(errors))
        print("\nRun 'erc config' to see full configuration status.")
        sys.exit(EXIT_FAILURE)

    try:
        code = COMMANDS[args.command](args, settings)
    except ErcError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        code = exc.exit_code
    except OSError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_FAILURE
    sys.exit(code)


if __name__ == "__main__":
    main()

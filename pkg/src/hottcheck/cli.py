"""Command-line front end.

    hottcheck check FILE...     type-check declarations in order
    hottcheck axioms FILE...    print the axiom footprint of each declaration
    hottcheck corpus            check the shipped corpus against its manifest

Exit status is 0 when everything checks, 1 when some declaration fails and
2 for usage, IO and parse errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .checker import check_module
from .corpus import ManifestError, check_corpus, corpus_paths, load_manifest
from .surface import SourceError, parse_file

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse calls sys.exit on bad usage; surface it as an exception instead.
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--trace-conversion", action="store_true", help="print each failed conversion in normal form")
    common.add_argument("--no-eta", action="store_true", help="disable eta rules in conversion")
    common.add_argument("--quiet", action="store_true", help="only print failures and the summary")

    parser = _Parser(prog="hottcheck", description="Proof checker for a small homotopy type theory.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("check", "type-check files in order"),
        ("axioms", "print the axiom footprint of each declaration"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("files", nargs="+", metavar="FILE")
    sub.add_parser("corpus", parents=[common], help="check the shipped corpus and its manifest")
    return parser


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        print(e, file=out)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    def show_failure(expected, got):
        print(f"conversion failed:\n  expected: {expected}\n  got:      {got}", file=out)

    trace = show_failure if args.trace_conversion else None

    if args.command == "corpus":
        return _run_corpus(args, trace, out)
    return _run_files(args, trace, out)


def _run_files(args, trace, out) -> int:
    try:
        modules = [parse_file(path) for path in args.files]
    except OSError as e:
        print(f"error: cannot read {e.filename}: {e.strerror}", file=out)
        return EXIT_USAGE
    except SourceError as e:
        print(f"error: {e}", file=out)
        return EXIT_USAGE

    eta = not args.no_eta
    sig = None
    base = _corpus_context(args.files)
    if base:
        sig, base_report = check_module([parse_file(p) for p in base], eta=eta)
        if not base_report.ok:
            print("error: the shipped corpus does not check; run `hottcheck corpus`", file=out)
            return EXIT_FAIL
    _, report = check_module(modules, sig, eta=eta, trace=trace)
    for entry in report.entries:
        if not entry.ok:
            print(f"FAIL {entry.name}: {_one_line(entry.error)}", file=out)
        elif args.command == "axioms":
            print(f"{entry.name}: {_fmt_axioms(entry.footprint)}", file=out)
        elif not args.quiet:
            print(f"OK {entry.name}", file=out)
    return EXIT_OK if report.ok else EXIT_FAIL


def _run_corpus(args, trace, out) -> int:
    try:
        manifest = load_manifest()
    except (OSError, ManifestError) as e:
        print(f"error: {e}", file=out)
        return EXIT_USAGE

    def show(result):
        name = result.entry.name
        if not result.ok:
            print(f"FAIL {name}: {_one_line(result.error)}", file=out)
        elif not args.quiet:
            print(f"OK {name}: {_fmt_axioms(result.footprint)}", file=out)

    try:
        result = check_corpus(manifest, eta=not args.no_eta, trace=trace, on_result=show)
    except SourceError as e:
        print(f"error: {e}", file=out)
        return EXIT_USAGE
    for problem in result.problems:
        print(f"FAIL manifest: {problem}", file=out)
    if result.ok:
        print(f"CORPUS OK ({len(result.results)} entries)", file=out)
        return EXIT_OK
    failed = sum(not r.ok for r in result.results) + len(result.problems)
    print(f"CORPUS FAILED ({failed} of {len(result.results)} entries)", file=out)
    return EXIT_FAIL


def _corpus_context(files) -> list:
    """Shipped corpus files that must be loaded before the given ones.

    A corpus file builds on the files before it in the shipped order, so
    naming one on the command line pulls its predecessors in silently.
    """
    shipped = [p.resolve() for p in corpus_paths()]
    given = {Path(f).resolve() for f in files}
    positions = [shipped.index(p) for p in given if p in shipped]
    if not positions:
        return []
    return [p for p in shipped[: max(positions)] if p not in given]


def _fmt_axioms(names) -> str:
    return "{" + ", ".join(sorted(names)) + "}"


def _one_line(msg: Optional[str]) -> str:
    return " | ".join(" ".join(line.split()) for line in (msg or "").splitlines() if line.strip())


def main() -> None:
    sys.exit(run())

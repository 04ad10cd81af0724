"""The shipped corpus of ``.hott`` files and its manifest.

The manifest is a tab-separated table with one row per declaration::

    name <TAB> file <TAB> reference <TAB> expected-axioms

Blank lines and lines starting with ``#`` are comments.  Rows are checked in
manifest order, and the footprint of every row must stay inside its
expected axioms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from ..checker import Checker, TypeCheckError, run_deep
from ..surface import parse_file

CORPUS_FILES = ("prelude_axioms.hott", "prelude.hott", "adj.hott", "two_adj.hott")

TRUSTED_AXIOMS = frozenset(
    {"funext", "equiv_induction", "is_prop_ishadj", "is_prop_ishadjl", "fib_eq_char", "fib_contr"}
)


class ManifestError(Exception):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    file: str
    reference: str
    expected_axioms: frozenset


@dataclass
class EntryResult:
    entry: CorpusEntry
    ok: bool
    error: Optional[str]
    footprint: frozenset = frozenset()


@dataclass
class CorpusResult:
    results: list = field(default_factory=list)
    problems: list = field(default_factory=list)  # manifest/corpus mismatches

    @property
    def ok(self) -> bool:
        return not self.problems and all(r.ok for r in self.results)


def corpus_dir() -> Path:
    return Path(str(resources.files(__name__)))


def corpus_paths() -> list[Path]:
    return [corpus_dir() / name for name in CORPUS_FILES]


def parse_manifest(text: str) -> list[CorpusEntry]:
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise ManifestError(f"manifest line {lineno}: expected 4 tab-separated fields, got {len(cols)}")
        name, file, ref, axioms = cols
        expected = frozenset(a.strip() for a in axioms.split(",") if a.strip())
        entries.append(CorpusEntry(name, file, ref, expected))
    return entries


def load_manifest(path: Optional[Path] = None) -> list[CorpusEntry]:
    path = path or corpus_dir() / "manifest"
    return parse_manifest(Path(path).read_text(encoding="utf-8"))


def check_corpus(
    manifest: Optional[list[CorpusEntry]] = None,
    eta: bool = True,
    trace: Optional[Callable] = None,
    on_result: Optional[Callable[[EntryResult], None]] = None,
) -> CorpusResult:
    """Check every manifest entry in order against the shipped sources."""
    manifest = load_manifest() if manifest is None else manifest
    return run_deep(_check_corpus, manifest, eta, trace, on_result)


def _check_corpus(manifest, eta, trace, on_result) -> CorpusResult:
    out = CorpusResult()
    decls = {}
    for path in corpus_paths():
        for sd in parse_file(path).declarations:
            decls[sd.name] = (path.name, sd.to_declaration())

    listed = {e.name for e in manifest}
    for name in decls:
        if name not in listed:
            out.problems.append(f"{name} is declared but missing from the manifest")

    checker = Checker(eta=eta, trace=trace)
    for entry in manifest:
        found = decls.get(entry.name)
        if found is None:
            result = EntryResult(entry, False, "not declared in any corpus file")
        elif found[0] != entry.file:
            result = EntryResult(entry, False, f"declared in {found[0]}, manifest says {entry.file}")
        else:
            result = _check_entry(checker, entry, found[1])
        out.results.append(result)
        if on_result is not None:
            on_result(result)
    return out


def _check_entry(checker: Checker, entry: CorpusEntry, decl) -> EntryResult:
    try:
        checker.check_declaration(decl)
    except TypeCheckError as e:
        return EntryResult(entry, False, str(e))
    fp = checker.sig.footprints[entry.name]
    untrusted = fp - TRUSTED_AXIOMS
    if decl.is_axiom and entry.name not in TRUSTED_AXIOMS:
        return EntryResult(entry, False, "axiom outside the trusted prelude", fp)
    if untrusted:
        return EntryResult(entry, False, f"untrusted axioms {sorted(untrusted)}", fp)
    if not fp <= entry.expected_axioms:
        extra = sorted(fp - entry.expected_axioms)
        return EntryResult(entry, False, f"footprint exceeds expected axioms: {extra}", fp)
    return EntryResult(entry, True, None, fp)

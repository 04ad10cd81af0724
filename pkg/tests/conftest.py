import pytest

from hottcheck.checker import check_module, run_deep
from hottcheck.core import Const
from hottcheck.corpus import corpus_paths
from hottcheck.evaluator import normalize
from hottcheck.surface import parse_file, parse_source


@pytest.fixture(scope="session")
def corpus_modules():
    return [parse_file(p) for p in corpus_paths()]


@pytest.fixture(scope="session")
def corpus(corpus_modules):
    """The checked corpus signature and its report."""
    sig, report = check_module(corpus_modules)
    assert report.ok, [e for e in report.entries if not e.ok]
    return sig, report


@pytest.fixture(scope="session")
def corpus_sig(corpus):
    return corpus[0]


def check_extra(sig, src: str):
    """Check extra declarations on top of ``sig`` without modifying it."""
    return check_module([parse_source(src)], sig.copy())[1]


def accepts(sig, src: str) -> bool:
    return check_extra(sig, src).ok


def normal_form(sig, name: str, eta: bool = True):
    """Normal form of a checked constant at its declared type."""
    return run_deep(normalize, Const(name), sig.entries, type=sig.entries[name].type, eta=eta)


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)

import io
import subprocess
import sys

import pytest

from hottcheck.cli import run
from hottcheck.corpus import corpus_dir


def cli(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def good(tmp_path):
    p = tmp_path / "good.hott"
    p.write_text("def id (A : Type 0) (x : A) : A := x\naxiom X : Type 0\ndef k : Type 0 := X -> X\n")
    return p


@pytest.fixture
def bad(tmp_path):
    p = tmp_path / "bad.hott"
    p.write_text(
        "def ok : Type 1 := Type 0\n"
        "def t (A : Type 0) (f : A -> A) (a : A) : Id A (f a) a := refl (f a)\n"
        "def u (A : Type 0) (f : A -> A) (a : A) : Id A (f a) a := t A f a\n"
    )
    return p


def test_check_reports_each_declaration(good):
    code, text = cli("check", str(good))
    assert code == 0
    assert text.splitlines() == ["OK id", "OK X", "OK k"]


def test_check_failure_exit_code_and_format(bad):
    code, text = cli("check", str(bad))
    assert code == 1
    lines = text.splitlines()
    assert lines[0] == "OK ok"
    assert lines[1].startswith("FAIL t: 2:")
    assert "Mismatch" in lines[1]
    assert lines[2].startswith("FAIL u: 3:") and lines[2].endswith("depends on failed declaration t")


def test_quiet_hides_successes(good, bad):
    assert cli("check", "--quiet", str(good)) == (0, "")
    code, text = cli("check", "--quiet", str(bad))
    assert code == 1 and all(line.startswith("FAIL") for line in text.splitlines())


def test_trace_conversion_prints_normal_forms(bad):
    code, text = cli("check", "--trace-conversion", str(bad))
    assert code == 1
    assert "conversion failed:\n  expected: a\n  got:      f a" in text


def test_no_eta_rejects_eta_dependent_proofs(tmp_path):
    p = tmp_path / "eta.hott"
    p.write_text("def t (A B : Type 0) (f : A -> B) : Id (A -> B) f (fun x => f x) := refl f\n")
    assert cli("check", str(p))[0] == 0
    assert cli("check", "--no-eta", str(p))[0] == 1


def test_axioms_prints_footprints(good):
    code, text = cli("axioms", str(good))
    assert code == 0
    assert text.splitlines() == ["id: {}", "X: {X}", "k: {X}"]


def test_axioms_on_a_corpus_file_loads_its_predecessors():
    code, text = cli("axioms", str(corpus_dir() / "two_adj.hott"))
    assert code == 0
    lines = dict(line.split(": ", 1) for line in text.splitlines())
    assert lines["is_prop_is_two_hae"] == "{fib_contr, fib_eq_char, funext, is_prop_ishadjl}"
    assert lines["two_hae_swap"] == "{}"


def test_missing_file_is_a_usage_error(tmp_path):
    missing = tmp_path / "nope.hott"
    code, text = cli("check", str(missing))
    assert code == 2
    assert str(missing) in text


def test_parse_error_exits_two(tmp_path):
    p = tmp_path / "syntax.hott"
    p.write_text("def t : := Type 0\n")
    code, text = cli("check", str(p))
    assert code == 2
    assert "1:" in text


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["check"], ["check", "--bogus", "x.hott"], ["corpus", "extra"]])
def test_bad_invocations_exit_two(argv):
    assert cli(*argv)[0] == 2


def test_corpus_command():
    code, text = cli("corpus")
    lines = text.splitlines()
    assert code == 0
    assert lines[-1] == "CORPUS OK (134 entries)"
    assert len(lines) == 135
    assert "OK sigma_assoc: {}" in lines
    assert "OK is_prop_is_two_hae: {fib_contr, fib_eq_char, funext, is_prop_ishadjl}" in lines


def test_corpus_quiet_prints_only_summary():
    assert cli("corpus", "--quiet") == (0, "CORPUS OK (134 entries)\n")


def test_corpus_without_eta_fails():
    code, text = cli("corpus", "--quiet", "--no-eta")
    assert code == 1
    assert text.splitlines()[-1].startswith("CORPUS FAILED (")
    assert "FAIL sigma_assoc:" in text


def test_output_is_deterministic(bad):
    assert cli("check", str(bad)) == cli("check", str(bad))


def test_entry_point_runs_as_module():
    proc = subprocess.run([sys.executable, "-m", "hottcheck", "corpus", "--quiet"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "CORPUS OK (134 entries)\n"

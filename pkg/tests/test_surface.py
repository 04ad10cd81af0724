import pytest
from hypothesis import given, settings

from hottcheck.core import App, Const, Id, J, Lam, Pi, Refl, Sigma, Universe, Var, alpha_equal
from hottcheck.corpus import corpus_paths
from hottcheck.surface import (
    LexError,
    ParseError,
    parse_file,
    parse_source,
    parse_term,
    print_any,
    print_term,
    tokenize,
)
from test_core import terms

SCOPE = tuple(f"v{i}" for i in range(8))


def kinds(src):
    return [repr(t) for t in tokenize(src)]


def test_tokenize_examples():
    assert kinds("fun A => A") == ["KwFun", "Ident 'A'", "Arrow2", "Ident 'A'"]
    assert kinds("-- note\nType 0") == ["KwType", "Nat '0'"]
    assert tokenize("p .1") == tokenize("p.1")


def test_identifiers_allow_underscore_and_prime():
    assert kinds("x_1' y") == ["Ident \"x_1'\"", "Ident 'y'"]


@pytest.mark.parametrize("src, line, col", [("a\n  $", 2, 3), ("fun x => x ∘ x", 1, 12), ("1x", 1, 1)])
def test_lex_errors_carry_position(src, line, col):
    with pytest.raises(LexError) as e:
        tokenize(src)
    assert (e.value.span.line, e.value.span.col) == (line, col)


def test_parse_identity_definition():
    (d,) = parse_source("def id : (A : Type 0) -> A -> A := fun A x => x").declarations
    assert d.name == "id" and d.kind == "def"
    assert d.body == Lam("A", Lam("x", Var(0)))
    assert d.type == Pi("A", Universe(0), Pi("_", Var(0), Var(1)))


def test_parse_sigma_with_identity_component():
    t = parse_term("(x : A) * Id A x x", ("A",))
    assert t == Sigma("x", Var(0), Id(Var(1), Var(0), Var(0)))


def test_associativity_and_precedence():
    assert parse_term("A -> B -> C", ("A", "B", "C")) == parse_term("A -> (B -> C)", ("A", "B", "C"))
    assert parse_term("A * B * C", ("A", "B", "C")) == parse_term("A * (B * C)", ("A", "B", "C"))
    assert parse_term("f x y", ("f", "x", "y")) == App(App(Var(2), Var(1)), Var(0))
    # application binds tighter than projection's operand grouping: f x.1 is f (x.1)
    assert parse_term("f x.1", ("f", "x")) == parse_term("f (x.1)", ("f", "x"))
    # product binds tighter than arrow
    assert parse_term("A * B -> C", ("A", "B", "C")) == parse_term("(A * B) -> C", ("A", "B", "C"))


def test_params_desugar_to_binders():
    (d,) = parse_source("def k (A B : Type 0) (x : A) : B -> A := fun y => x").declarations
    decl = d.to_declaration()
    assert decl.body == Lam("A", Lam("B", Lam("x", Lam("y", Var(1)))))
    assert isinstance(decl.type, Pi) and decl.type.dom == Universe(0)


def test_unknown_names_become_constants():
    assert parse_term("foo x", ("x",)) == App(Const("foo"), Var(0))


def test_parse_error_reports_expected_tokens_and_span():
    with pytest.raises(ParseError) as e:
        parse_source("def x : Type 0 := fun => x")
    assert "Ident" in e.value.expected
    assert e.value.span.line == 1 and e.value.span.col == 23


def test_parse_error_at_end_of_input_is_inside_input():
    src = "def x : Type 0 :="
    with pytest.raises(ParseError) as e:
        parse_source(src)
    assert e.value.span.line == 1 and e.value.span.col <= len(src) + 1


def test_j_takes_exactly_six_arguments():
    t = parse_term("(J A a C d b p) r", tuple("AaCdbpr"))
    assert isinstance(t, App) and isinstance(t.fn, J)
    with pytest.raises(ParseError):
        parse_term("J A a C d b p r", tuple("AaCdbpr"))


def test_qinv_is_a_sigma_of_a_function_and_two_homotopies(corpus_modules):
    decls = {d.name: d for m in corpus_modules for d in m.declarations}
    qinv = decls["qinv"].to_declaration()
    body = qinv.body.body.body.body  # under A B f
    assert isinstance(body, Sigma)
    assert isinstance(body.fst, Pi)
    assert isinstance(body.snd, Sigma)
    assert body.snd.fst == App(App(App(App(Const("hty"), Var(3)), Var(3)), Lam("x", App(Var(1), App(Var(2), Var(0))))), App(Const("idmap"), Var(3)))


def test_printer_freshens_shadowed_names():
    t = Lam("x", Lam("x", Var(1)))
    assert print_term(t) == "fun x x1 => x"
    assert alpha_equal(parse_term(print_term(t)), t)


def test_printer_avoids_capturing_constants():
    t = Lam("ap", App(Const("ap"), Var(0)))
    s = print_term(t)
    assert alpha_equal(parse_term(s), t)


@pytest.mark.parametrize(
    "t",
    [
        App(J(Var(0), Var(0), Var(0), Var(0), Var(0), Var(0)), Var(0)),
        App(Refl(Var(0)), Var(0)),
        App(Id(Var(0), Var(0), Var(0)), Var(0)),
        App(Universe(0), Var(0)),
    ],
)
def test_fixed_arity_heads_are_parenthesized(t):
    s = print_term(t, ("v",))
    assert parse_term(s, ("v",)) == t


def test_print_parse_round_trip_simple():
    src = "fun A x => x"
    t = parse_term(src)
    assert alpha_equal(parse_term(print_term(t)), t)


@settings(max_examples=400, deadline=None)
@given(terms())
def test_print_parse_round_trip_random(t):
    s = print_term(t, SCOPE)
    assert parse_term(s, SCOPE) == t, s


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.name)
def test_corpus_round_trip(path):
    m = parse_file(path)
    again = parse_source(print_any(m))
    assert again == m
    assert [d.name for d in again.declarations] == [d.name for d in m.declarations]


def test_printing_twice_is_stable(corpus_modules):
    for m in corpus_modules:
        once = print_any(m)
        assert print_any(parse_source(once)) == once

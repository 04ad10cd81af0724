"""Lexer, parser and printer for ``.hott`` source files.

Grammar (``->`` and ``*`` are right-associative, application is
left-associative, projections bind tightest)::

    module ::= decl*
    decl   ::= "def" ident params? ":" term ":=" term
             | "axiom" ident params? ":" term
    params ::= ("(" ident+ ":" term ")")+
    term   ::= "fun" ident+ "=>" term
             | "let" ident ":" term ":=" term "in" term
             | binder "->" term | prod "->" term | prod
    prod   ::= binder "*" prod | app "*" prod | app
    binder ::= "(" ident+ ":" term ")"
    app    ::= "Id" arg arg arg | "refl" arg | "J" arg arg arg arg arg arg
             | "Type" natural | arg+
    arg    ::= atom (".1" | ".2")*
    atom   ::= ident | "(" term ")" | "(" term "," term ")"

Identifiers not bound by an enclosing binder refer to global constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import (
    App,
    Const,
    Declaration,
    Id,
    J,
    Lam,
    Let,
    Pair,
    Pi,
    Proj1,
    Proj2,
    Refl,
    Sigma,
    Span,
    Term,
    Universe,
    Var,
    constants,
    free_vars,
    shift,
)

KEYWORDS = {
    "def": "KwDef",
    "axiom": "KwAxiom",
    "fun": "KwFun",
    "let": "KwLet",
    "in": "KwIn",
    "Type": "KwType",
    "Id": "KwId",
    "refl": "KwRefl",
    "J": "KwJ",
}

SYMBOLS = [
    ("->", "Arrow"),
    ("=>", "Arrow2"),
    (":=", "Define"),
    (".1", "Fst"),
    (".2", "Snd"),
    ("(", "LParen"),
    (")", "RParen"),
    (":", "Colon"),
    ("*", "Star"),
    (",", "Comma"),
]


class SourceError(Exception):
    def __init__(self, message: str, span: Span, path: Optional[str] = None):
        self.message = message
        self.span = span
        self.path = path
        super().__init__(str(self))

    def __str__(self):
        where = f"{self.path}:" if self.path else ""
        return f"{where}{self.span}: {self.message}"


class LexError(SourceError):
    pass


class ParseError(SourceError):
    def __init__(self, message: str, span: Span, expected: frozenset = frozenset(), path: Optional[str] = None):
        self.expected = expected
        super().__init__(message, span, path)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span = field(compare=False)

    def __repr__(self):
        if self.kind in ("Ident", "Nat"):
            return f"{self.kind} {self.text!r}"
        return self.kind


def _ident_char(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c in "_'")


def tokenize(src: str, path: Optional[str] = None) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if src[i] == "\n":
                line, col = line + 1, 1
            else:
                col += 1
            i += 1

    while i < n:
        c = src[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                advance(1)
            continue
        start = (line, col)
        for sym, kind in SYMBOLS:
            if src.startswith(sym, i):
                advance(len(sym))
                tokens.append(Token(kind, sym, Span(*start, line, col)))
                break
        else:
            if c.isascii() and c.isdigit():
                j = i
                while j < n and src[j].isascii() and src[j].isdigit():
                    j += 1
                if j < n and _ident_char(src[j]):
                    raise LexError("identifiers may not start with a digit", Span(*start, line, col + 1), path)
                text = src[i:j]
                advance(j - i)
                tokens.append(Token("Nat", text, Span(*start, line, col)))
            elif _ident_char(c):
                j = i
                while j < n and _ident_char(src[j]):
                    j += 1
                text = src[i:j]
                advance(j - i)
                tokens.append(Token(KEYWORDS.get(text, "Ident"), text, Span(*start, line, col)))
            else:
                raise LexError(f"unexpected character {c!r}", Span(*start, line, col + 1), path)
    return tokens


# -- source modules ----------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str = field(compare=False)
    type: Term = None


@dataclass(frozen=True)
class SurfaceDecl:
    """A declaration as written: parameters are kept separate from the type."""

    kind: str
    name: str
    params: tuple[Param, ...]
    type: Term
    body: Optional[Term]
    span: Optional[Span] = field(default=None, compare=False)

    def to_declaration(self) -> Declaration:
        ty = self.type
        body = self.body
        for p in reversed(self.params):
            ty = Pi(p.name, p.type, ty)
            if body is not None:
                body = Lam(p.name, body)
        return Declaration(self.kind, self.name, ty, body, self.span)


@dataclass(frozen=True)
class SourceModule:
    path: Optional[str]
    declarations: tuple[SurfaceDecl, ...]

    def to_declarations(self) -> list[Declaration]:
        return [d.to_declaration() for d in self.declarations]

    def __eq__(self, other):
        if not isinstance(other, SourceModule):
            return NotImplemented
        return self.declarations == other.declarations

    def __hash__(self):
        return hash(self.declarations)


class Parser:
    def __init__(self, tokens: list[Token], path: Optional[str] = None):
        self.tokens = tokens
        self.pos = 0
        self.path = path
        self.scope: list[str] = []

    # token helpers
    def peek(self, k: int = 0) -> Optional[Token]:
        j = self.pos + k
        return self.tokens[j] if j < len(self.tokens) else None

    def at(self, *kinds: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind in kinds

    def _eof_span(self) -> Span:
        if self.tokens:
            s = self.tokens[-1].span
            return Span(s.end_line, s.end_col, s.end_line, s.end_col)
        return Span(1, 1, 1, 1)

    def error(self, expected: set[str]):
        tok = self.peek()
        exp = ", ".join(sorted(expected))
        if tok is None:
            raise ParseError(f"unexpected end of input, expected {exp}", self._eof_span(), frozenset(expected), self.path)
        raise ParseError(f"unexpected {tok.text!r}, expected {exp}", tok.span, frozenset(expected), self.path)

    def expect(self, kind: str) -> Token:
        if not self.at(kind):
            self.error({kind})
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _span_from(self, start: Token) -> Span:
        end = self.tokens[self.pos - 1].span
        return Span(start.span.line, start.span.col, end.end_line, end.end_col)

    # declarations
    def parse_module(self) -> SourceModule:
        decls = []
        while self.peek() is not None:
            decls.append(self.parse_decl())
        return SourceModule(self.path, tuple(decls))

    def parse_decl(self) -> SurfaceDecl:
        start = self.peek()
        if not self.at("KwDef", "KwAxiom"):
            self.error({"KwDef", "KwAxiom"})
        kind = "def" if start.kind == "KwDef" else "axiom"
        self.pos += 1
        name = self.expect("Ident").text
        params: list[Param] = []
        while self.at("LParen"):
            for pname, pty in self.parse_binder_group():
                params.append(Param(pname, pty))
                self.scope.append(pname)
        self.expect("Colon")
        ty = self.parse_term()
        body = None
        if kind == "def":
            self.expect("Define")
            body = self.parse_term()
        del self.scope[len(self.scope) - len(params):]
        return SurfaceDecl(kind, name, tuple(params), ty, body, self._span_from(start))

    def parse_binder_group(self) -> list[tuple[str, Term]]:
        """Parse ``(x y : T)``; each later binder's type is shifted under the earlier ones."""
        self.expect("LParen")
        names = [self.expect("Ident").text]
        while self.at("Ident"):
            names.append(self.expect("Ident").text)
        self.expect("Colon")
        ty = self.parse_term()
        self.expect("RParen")
        return [(n, shift(ty, 0, k)) for k, n in enumerate(names)]

    def _is_binder(self) -> bool:
        if not self.at("LParen"):
            return False
        k = 1
        while (tok := self.peek(k)) is not None and tok.kind == "Ident":
            k += 1
        tok = self.peek(k)
        return k > 1 and tok is not None and tok.kind == "Colon"

    # terms
    def parse_term(self) -> Term:
        start = self.peek()
        if self.at("KwFun"):
            self.pos += 1
            names = [self.expect("Ident").text]
            while self.at("Ident"):
                names.append(self.expect("Ident").text)
            self.expect("Arrow2")
            self.scope.extend(names)
            body = self.parse_term()
            del self.scope[len(self.scope) - len(names):]
            for n in reversed(names):
                body = Lam(n, body, span=self._span_from(start))
            return body
        if self.at("KwLet"):
            self.pos += 1
            name = self.expect("Ident").text
            self.expect("Colon")
            annot = self.parse_term()
            self.expect("Define")
            bound = self.parse_term()
            self.expect("KwIn")
            self.scope.append(name)
            body = self.parse_term()
            self.scope.pop()
            return Let(name, annot, bound, body, span=self._span_from(start))
        if self._is_binder():
            save = self.pos
            group = self.parse_binder_group()
            if self.at("Arrow", "Star"):
                return self._finish_binder(group, start)
            self.pos = save
        return self.parse_arrow()

    def _finish_binder(self, group, start) -> Term:
        former = Pi if self.at("Arrow") else Sigma
        self.pos += 1
        self.scope.extend(n for n, _ in group)
        cod = self.parse_term() if former is Pi else self._parse_prod_rhs()
        del self.scope[len(self.scope) - len(group):]
        for n, ty in reversed(group):
            cod = former(n, ty, cod, span=self._span_from(start))
        return cod

    def _parse_prod_rhs(self) -> Term:
        start = self.peek()
        if self._is_binder():
            save = self.pos
            group = self.parse_binder_group()
            if self.at("Star"):
                return self._finish_binder(group, start)
            self.pos = save
        return self.parse_prod()

    def parse_arrow(self) -> Term:
        start = self.peek()
        lhs = self.parse_prod()
        if self.at("Arrow"):
            self.pos += 1
            self.scope.append("_")
            rhs = self.parse_term()
            self.scope.pop()
            return Pi("_", lhs, rhs, span=self._span_from(start))
        return lhs

    def parse_prod(self) -> Term:
        start = self.peek()
        lhs = self.parse_app()
        if self.at("Star"):
            self.pos += 1
            self.scope.append("_")
            rhs = self._parse_prod_rhs()
            self.scope.pop()
            return Sigma("_", lhs, rhs, span=self._span_from(start))
        return lhs

    def parse_app(self) -> Term:
        start = self.peek()
        if self.at("KwId"):
            self.pos += 1
            a, x, y = (self.parse_arg() for _ in range(3))
            return Id(a, x, y, span=self._span_from(start))
        if self.at("KwRefl"):
            self.pos += 1
            return Refl(self.parse_arg(), span=self._span_from(start))
        if self.at("KwJ"):
            self.pos += 1
            args = [self.parse_arg() for _ in range(6)]
            return J(*args, span=self._span_from(start))
        if self.at("KwType"):
            self.pos += 1
            level = int(self.expect("Nat").text)
            return Universe(level, span=self._span_from(start))
        t = self.parse_arg()
        while self.at("Ident", "LParen"):
            t = App(t, self.parse_arg(), span=self._span_from(start))
        return t

    def parse_arg(self) -> Term:
        start = self.peek()
        t = self.parse_atom()
        while self.at("Fst", "Snd"):
            proj = Proj1 if self.peek().kind == "Fst" else Proj2
            self.pos += 1
            t = proj(t, span=self._span_from(start))
        return t

    def parse_atom(self) -> Term:
        start = self.peek()
        if self.at("Ident"):
            name = self.expect("Ident").text
            span = start.span
            for k in range(len(self.scope) - 1, -1, -1):
                if self.scope[k] == name:
                    return Var(len(self.scope) - 1 - k, span=span)
            return Const(name, span=span)
        if self.at("LParen"):
            self.pos += 1
            t = self.parse_term()
            if self.at("Comma"):
                self.pos += 1
                u = self.parse_term()
                self.expect("RParen")
                return Pair(t, u, span=self._span_from(start))
            self.expect("RParen")
            return t
        self.error({"Ident", "LParen"})


def parse_module(tokens: list[Token], path: Optional[str] = None) -> SourceModule:
    return Parser(tokens, path).parse_module()


def parse_source(src: str, path: Optional[str] = None) -> SourceModule:
    return parse_module(tokenize(src, path), path)


def parse_file(path) -> SourceModule:
    path = Path(path)
    return parse_source(path.read_text(encoding="utf-8"), str(path))


def parse_term(src: str, scope: tuple[str, ...] = ()) -> Term:
    p = Parser(tokenize(src))
    p.scope = list(scope)
    t = p.parse_term()
    if p.peek() is not None:
        p.error({"end of input"})
    return t


# -- printing ----------------------------------------------------------------

# Precedence levels for the printer.
_TERM, _ARROW, _PROD, _APP, _ARG = range(5)


class Printer:
    def __init__(self, avoid: set[str]):
        self.avoid = avoid

    def fresh(self, hint: str, scope: list[str]) -> str:
        base = hint if hint and hint != "_" and hint not in KEYWORDS else "x"
        taken = set(scope) | self.avoid
        if base not in taken:
            return base
        k = 1
        while f"{base}{k}" in taken:
            k += 1
        return f"{base}{k}"

    def show(self, t: Term, scope: list[str], prec: int = _TERM) -> str:
        match t:
            case Var(i):
                if i >= len(scope):
                    return f"#{i}"
                return scope[len(scope) - 1 - i]
            case Const(name):
                return name
            case Universe(level):
                return self._paren(f"Type {level}", prec > _APP)
            case Lam():
                names = []
                while isinstance(t, Lam):
                    n = self.fresh(t.name, scope)
                    names.append(n)
                    scope = scope + [n]
                    t = t.body
                s = f"fun {' '.join(names)} => {self.show(t, scope, _TERM)}"
                return self._paren(s, prec > _TERM)
            case Let(name, annot, bound, body):
                n = self.fresh(name, scope)
                s = (
                    f"let {n} : {self.show(annot, scope)} := {self.show(bound, scope)} in "
                    f"{self.show(body, scope + [n])}"
                )
                return self._paren(s, prec > _TERM)
            case Pi(name, dom, cod):
                if 0 not in _free_at(cod):
                    s = f"{self.show(dom, scope, _PROD)} -> {self.show(cod, scope + ['_'], _ARROW)}"
                else:
                    n = self.fresh(name, scope)
                    s = f"({n} : {self.show(dom, scope)}) -> {self.show(cod, scope + [n], _ARROW)}"
                return self._paren(s, prec > _ARROW)
            case Sigma(name, fst, snd):
                if 0 not in _free_at(snd):
                    s = f"{self.show(fst, scope, _APP)} * {self.show(snd, scope + ['_'], _PROD)}"
                else:
                    n = self.fresh(name, scope)
                    s = f"({n} : {self.show(fst, scope)}) * {self.show(snd, scope + [n], _PROD)}"
                return self._paren(s, prec > _PROD)
            case App(fn, arg):
                # J, Id, refl and Type take a fixed number of arguments
                head = _ARG if isinstance(fn, (J, Id, Refl, Universe)) else _APP
                s = f"{self.show(fn, scope, head)} {self.show(arg, scope, _ARG)}"
                return self._paren(s, prec > _APP)
            case Pair(a, b):
                return f"({self.show(a, scope)}, {self.show(b, scope)})"
            case Proj1(p):
                return f"{self.show(p, scope, _ARG)}.1"
            case Proj2(p):
                return f"{self.show(p, scope, _ARG)}.2"
            case Id(a, x, y):
                s = f"Id {self.show(a, scope, _ARG)} {self.show(x, scope, _ARG)} {self.show(y, scope, _ARG)}"
                return self._paren(s, prec > _APP)
            case Refl(a):
                return self._paren(f"refl {self.show(a, scope, _ARG)}", prec > _APP)
            case J():
                args = " ".join(
                    self.show(x, scope, _ARG) for x in (t.type, t.base, t.motive, t.case, t.other, t.path)
                )
                return self._paren(f"J {args}", prec > _APP)
        raise TypeError(f"cannot print {t!r}")

    @staticmethod
    def _paren(s: str, cond: bool) -> str:
        return f"({s})" if cond else s


def _free_at(t: Term) -> set[int]:
    return free_vars(t)


def print_term(t: Term, scope: tuple[str, ...] = ()) -> str:
    return Printer(constants(t)).show(t, list(scope))


def print_decl(d: SurfaceDecl, avoid: Optional[set[str]] = None) -> str:
    consts = set(avoid or ())
    consts |= constants(d.type)
    if d.body is not None:
        consts |= constants(d.body)
    for p in d.params:
        consts |= constants(p.type)
    pr = Printer(consts)
    scope: list[str] = []
    parts = ["def" if d.kind == "def" else "axiom", d.name]
    for p in d.params:
        n = pr.fresh(p.name, scope)
        parts.append(f"({n} : {pr.show(p.type, scope)})")
        scope.append(n)
    head = " ".join(parts) + " : " + pr.show(d.type, scope)
    if d.body is None:
        return head
    return head + "\n  := " + pr.show(d.body, scope)


def print_module(m: SourceModule) -> str:
    return "\n\n".join(print_decl(d) for d in m.declarations) + "\n"


def print_any(x) -> str:
    """Print a term or a source module."""
    if isinstance(x, SourceModule):
        return print_module(x)
    return print_term(x)

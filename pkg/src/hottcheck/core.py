"""Core syntax of the calculus.

Terms use de Bruijn indices.  Binder names are kept only as printing hints
and never take part in equality, so ``==`` on terms is alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union


class Span(NamedTuple):
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


class InternalError(Exception):
    """Raised when a kernel invariant is violated (a bug, not a user error)."""


def _hint(default: str = "_"):
    return field(default=default, compare=False)


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Var:
    index: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Universe:
    level: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Pi:
    name: str = _hint()
    dom: "Term" = None
    cod: "Term" = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Lam:
    name: str = _hint()
    body: "Term" = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Sigma:
    name: str = _hint()
    fst: "Term" = None
    snd: "Term" = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Proj1:
    term: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Proj2:
    term: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Id:
    type: "Term"
    lhs: "Term"
    rhs: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Refl:
    arg: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class J:
    """Based path induction.

    ``J A a C d b p : C b p`` for ``C : (x : A) -> Id A a x -> Type i``,
    ``d : C a (refl a)`` and ``p : Id A a b``.
    """

    type: "Term"
    base: "Term"
    motive: "Term"
    case: "Term"
    other: "Term"
    path: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Let:
    name: str = _hint()
    annot: "Term" = None
    bound: "Term" = None
    body: "Term" = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Const:
    name: str
    span: Optional[Span] = _span()


Term = Union[Var, Universe, Pi, Lam, App, Sigma, Pair, Proj1, Proj2, Id, Refl, J, Let, Const]


def arrow(dom: Term, cod: Term) -> Pi:
    """Non-dependent function type; ``cod`` is given in the outer scope."""
    return Pi("_", dom, shift(cod, 0, 1))


def product(fst: Term, snd: Term) -> Sigma:
    return Sigma("_", fst, shift(snd, 0, 1))


def apps(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


# Child layout: (attribute, number of binders the child sits under).
_CHILDREN = {
    Var: (),
    Universe: (),
    Const: (),
    Pi: (("dom", 0), ("cod", 1)),
    Lam: (("body", 1),),
    App: (("fn", 0), ("arg", 0)),
    Sigma: (("fst", 0), ("snd", 1)),
    Pair: (("fst", 0), ("snd", 0)),
    Proj1: (("term", 0),),
    Proj2: (("term", 0),),
    Id: (("type", 0), ("lhs", 0), ("rhs", 0)),
    Refl: (("arg", 0),),
    J: (("type", 0), ("base", 0), ("motive", 0), ("case", 0), ("other", 0), ("path", 0)),
    Let: (("annot", 0), ("bound", 0), ("body", 1)),
}


def children(t: Term):
    """Yield ``(attribute, binders, child)`` triples of ``t``."""
    for attr, binders in _CHILDREN[type(t)]:
        yield attr, binders, getattr(t, attr)


def map_children(t: Term, fn) -> Term:
    """Rebuild ``t`` with ``fn(child, binders)`` applied to each child."""
    layout = _CHILDREN[type(t)]
    if not layout:
        return t
    changes = {attr: fn(getattr(t, attr), binders) for attr, binders in layout}
    return _replace(t, changes)


def _replace(t: Term, changes: dict) -> Term:
    kwargs = {f: getattr(t, f) for f in t.__dataclass_fields__}
    kwargs.update(changes)
    return type(t)(**kwargs)


def shift(t: Term, cutoff: int, amount: int) -> Term:
    """Add ``amount`` to every free index ``>= cutoff``."""
    if amount == 0:
        return t

    def go(t: Term, c: int) -> Term:
        if isinstance(t, Var):
            if t.index < c:
                return t
            new = t.index + amount
            if new < 0:
                raise InternalError(f"shift underflow at index {t.index} by {amount}")
            return Var(new, span=t.span)
        return map_children(t, lambda child, b: go(child, c + b))

    return go(t, cutoff)


def alpha_equal(t: Term, u: Term) -> bool:
    return t == u


def free_vars(t: Term) -> set[int]:
    out: set[int] = set()

    def go(t: Term, depth: int):
        if isinstance(t, Var):
            if t.index >= depth:
                out.add(t.index - depth)
            return
        for _, b, child in children(t):
            go(child, depth + b)

    go(t, 0)
    return out


def is_closed_in(t: Term, depth: int) -> bool:
    """True iff every free index of ``t`` is below ``depth``."""
    return all(i < depth for i in free_vars(t))


def constants(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Const):
            out.add(t.name)
        else:
            stack.extend(child for _, _, child in children(t))
    return out


def term_size(t: Term) -> int:
    n = 0
    stack = [t]
    while stack:
        t = stack.pop()
        n += 1
        stack.extend(child for _, _, child in children(t))
    return n


@dataclass(frozen=True)
class Declaration:
    kind: str  # "def" or "axiom"
    name: str
    type: Term
    body: Optional[Term] = None
    span: Optional[Span] = field(default=None, compare=False)

    @property
    def is_axiom(self) -> bool:
        return self.kind == "axiom"

"""Bidirectional type checking over the NbE evaluator."""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

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
)
from .evaluator import (
    Conversion,
    GlobalEntry,
    HostClosure,
    VId,
    VPi,
    VRefl,
    VSigma,
    VUniverse,
    Value,
    eval_term,
    force,
    fresh,
    readback,
    readback_type,
    vapp,
    vproj1,
)
from .surface import SourceModule, parse_file, print_term


class TypeCheckError(Exception):
    """A typing failure.  ``kind`` is one of the names in :data:`ERROR_KINDS`."""

    def __init__(self, kind: str, message: str, span: Optional[Span] = None):
        self.kind = kind
        self.message = message
        self.span = span
        super().__init__(str(self))

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.kind}: {self.message}"


ERROR_KINDS = (
    "NotInferable",
    "NotAFunction",
    "NotAPair",
    "UniverseExpected",
    "UnboundName",
    "Mismatch",
    "DuplicateName",
)


@dataclass(frozen=True)
class Context:
    """Typing context: a telescope of (name, type) plus the evaluation environment."""

    names: tuple = ()
    types: tuple = ()
    env: tuple = ()

    def __len__(self):
        return len(self.types)

    def bind(self, name: str, ty: Value) -> "Context":
        x = fresh(len(self.types), ty)
        return Context(self.names + (name,), self.types + (ty,), self.env + (x,))

    def define(self, name: str, ty: Value, value: Value) -> "Context":
        return Context(self.names + (name,), self.types + (ty,), self.env + (value,))

    def lookup(self, index: int) -> Value:
        return self.types[len(self.types) - 1 - index]


@dataclass
class Signature:
    """Checked declarations in order, with their values and axiom footprints."""

    entries: dict = field(default_factory=dict)  # name -> GlobalEntry
    declarations: list = field(default_factory=list)
    footprints: dict = field(default_factory=dict)  # name -> frozenset[str]

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def axioms(self) -> set[str]:
        return {n for n, e in self.entries.items() if e.is_axiom}

    def copy(self) -> "Signature":
        return Signature(dict(self.entries), list(self.declarations), dict(self.footprints))


class Checker:
    """Type checker bound to a signature.

    ``trace`` receives ``(expected, got)`` normal-form strings for every
    failed conversion when set.
    """

    def __init__(self, sig: Optional[Signature] = None, eta: bool = True, trace: Optional[Callable] = None):
        self.sig = sig if sig is not None else Signature()
        self.eta = eta
        self.trace = trace
        self._conv = Conversion(eta)

    @property
    def globals(self) -> dict:
        return self.sig.entries

    def eval(self, ctx: Context, t: Term) -> Value:
        return eval_term(ctx.env, t, self.globals)

    # -- printing for diagnostics --

    def show_type(self, ctx: Context, v: Value) -> str:
        return print_term(readback_type(len(ctx), v, self.eta), ctx.names)

    def show_value(self, ctx: Context, v: Value, ty: Value) -> str:
        return print_term(readback(len(ctx), v, ty, self.eta), ctx.names)

    def conv_type(self, ctx: Context, a: Value, b: Value) -> bool:
        return self._conv.conv_type(len(ctx), a, b)

    def conv(self, ctx: Context, a: Value, b: Value, ty: Value) -> bool:
        return self._conv.conv(len(ctx), a, b, ty)

    def _mismatch(self, ctx, expected: str, got: str, what: str, span) -> TypeCheckError:
        if self.trace is not None:
            self.trace(expected, got)
        return TypeCheckError("Mismatch", f"{what}\n  expected: {expected}\n  got:      {got}", span)

    # -- inference --

    def infer(self, ctx: Context, t: Term) -> Value:
        match t:
            case Var(i):
                if i >= len(ctx):
                    raise TypeCheckError("UnboundName", f"unbound variable index {i}", t.span)
                return ctx.lookup(i)
            case Const(name):
                entry = self.globals.get(name)
                if entry is None:
                    raise TypeCheckError("UnboundName", f"unknown constant {name}", t.span)
                return entry.type
            case Universe(level):
                return VUniverse(level + 1)
            case Pi(name, dom, cod) | Sigma(name, dom, cod):
                i = self.infer_universe(ctx, dom)
                j = self.infer_universe(ctx.bind(name, self.eval(ctx, dom)), cod)
                return VUniverse(max(i, j))
            case Id(A, x, y):
                i = self.infer_universe(ctx, A)
                Av = self.eval(ctx, A)
                self.check(ctx, x, Av)
                self.check(ctx, y, Av)
                return VUniverse(i)
            case App(fn, arg):
                fty = force(self.infer(ctx, fn))
                if not isinstance(fty, VPi):
                    raise TypeCheckError(
                        "NotAFunction", f"{print_term(fn, ctx.names)} has type {self.show_type(ctx, fty)}", t.span
                    )
                self.check(ctx, arg, fty.dom)
                return fty.cod(self.eval(ctx, arg))
            case Proj1(p) | Proj2(p):
                pty = force(self.infer(ctx, p))
                if not isinstance(pty, VSigma):
                    raise TypeCheckError("NotAPair", f"{print_term(p, ctx.names)} has type {self.show_type(ctx, pty)}", t.span)
                if isinstance(t, Proj1):
                    return pty.dom
                return pty.cod(vproj1(self.eval(ctx, p)))
            case J(A, a, C, d, b, p):
                self.infer_universe(ctx, A)
                Av = self.eval(ctx, A)
                self.check(ctx, a, Av)
                av = self.eval(ctx, a)
                self.check_motive(ctx, C, Av, av)
                Cv = self.eval(ctx, C)
                self.check(ctx, d, vapp(vapp(Cv, av), VRefl(av)))
                self.check(ctx, b, Av)
                bv = self.eval(ctx, b)
                self.check(ctx, p, VId(Av, av, bv))
                return vapp(vapp(Cv, bv), self.eval(ctx, p))
            case Let(name, annot, bound, body):
                self.infer_universe(ctx, annot)
                av = self.eval(ctx, annot)
                self.check(ctx, bound, av)
                return self.infer(ctx.define(name, av, self.eval(ctx, bound)), body)
            case Lam() | Pair() | Refl():
                raise TypeCheckError(
                    "NotInferable",
                    f"cannot infer a type for {print_term(t, ctx.names)}; annotate it with let",
                    t.span,
                )
        raise TypeCheckError("NotInferable", f"unknown term {t!r}", getattr(t, "span", None))

    def infer_universe(self, ctx: Context, t: Term) -> int:
        ty = force(self.infer(ctx, t))
        if not isinstance(ty, VUniverse):
            raise TypeCheckError(
                "UniverseExpected", f"{print_term(t, ctx.names)} has type {self.show_type(ctx, ty)}", t.span
            )
        return ty.level

    def check_motive(self, ctx: Context, C: Term, A: Value, a: Value) -> int:
        """Check ``C : (x : A) -> Id A a x -> Type k`` and return ``k``."""
        if isinstance(C, Lam) and isinstance(C.body, Lam):
            inner = ctx.bind(C.name, A)
            x = inner.env[-1]
            inner = inner.bind(C.body.name, VId(A, a, x))
            return self.infer_universe(inner, C.body.body)
        cty = self.infer(ctx, C)
        k = _motive_level(cty)
        if k is None:
            raise TypeCheckError("UniverseExpected", f"motive has type {self.show_type(ctx, cty)}", C.span)
        expected = VPi("x", A, HostClosure(lambda x: VPi("p", VId(A, a, x), HostClosure(lambda _p: VUniverse(k)))))
        if not self.conv_type(ctx, expected, cty):
            raise self._mismatch(ctx, self.show_type(ctx, expected), self.show_type(ctx, cty), "ill-typed motive", C.span)
        return k

    # -- checking --

    def check(self, ctx: Context, t: Term, expected: Value) -> None:
        match t, force(expected):
            case Lam(name, body), VPi(_, dom, cod):
                inner = ctx.bind(name, dom)
                self.check(inner, body, cod(inner.env[-1]))
                return
            case Lam(), _:
                raise self._mismatch(
                    ctx, self.show_type(ctx, expected), "a function", f"lambda {print_term(t, ctx.names)}", t.span
                )
            case Pair(a, b), VSigma(_, dom, cod):
                self.check(ctx, a, dom)
                self.check(ctx, b, cod(self.eval(ctx, a)))
                return
            case Pair(), _:
                raise self._mismatch(ctx, self.show_type(ctx, expected), "a pair", "pair", t.span)
            case Refl(a), VId(A, x, y):
                self.check(ctx, a, A)
                av = self.eval(ctx, a)
                for side, endpoint in (("left", x), ("right", y)):
                    if not self.conv(ctx, av, endpoint, A):
                        raise self._mismatch(
                            ctx,
                            self.show_value(ctx, endpoint, A),
                            self.show_value(ctx, av, A),
                            f"refl does not match the {side} endpoint",
                            t.span,
                        )
                return
            case Refl(), _:
                raise self._mismatch(ctx, self.show_type(ctx, expected), "an identity type", "refl", t.span)
            case Let(name, annot, bound, body), _:
                self.infer_universe(ctx, annot)
                av = self.eval(ctx, annot)
                self.check(ctx, bound, av)
                self.check(ctx.define(name, av, self.eval(ctx, bound)), body, expected)
                return
        got = self.infer(ctx, t)
        if not self.conv_type(ctx, got, expected):
            raise self._mismatch(
                ctx,
                self.show_type(ctx, expected),
                self.show_type(ctx, got),
                f"type mismatch for {_excerpt(print_term(t, ctx.names))}",
                t.span,
            )

    # -- declarations --

    def check_declaration(self, d: Declaration) -> Signature:
        """Check ``d`` and add it to the signature (mutating and returning it)."""
        if d.name in self.sig:
            raise TypeCheckError("DuplicateName", f"{d.name} is already declared", d.span)
        ctx = Context()
        self.infer_universe(ctx, d.type)
        ty = self.eval(ctx, d.type)
        if d.is_axiom:
            self.sig.entries[d.name] = GlobalEntry(ty, None)
            self.sig.footprints[d.name] = frozenset({d.name})
        else:
            self.check(ctx, d.body, ty)
            self.sig.entries[d.name] = GlobalEntry(ty, self.eval(ctx, d.body))
            self.sig.footprints[d.name] = self.footprint_of(d.body)
        self.sig.declarations.append(d)
        return self.sig

    def footprint_of(self, body: Term) -> frozenset:
        out: set[str] = set()
        for name in constants(body):
            out |= self.sig.footprints.get(name, frozenset())
        return frozenset(out)


def _motive_level(cty: Value) -> Optional[int]:
    cty = force(cty)
    if not isinstance(cty, VPi):
        return None
    x = fresh(10**6, cty.dom)
    inner = force(cty.cod(x))
    if not isinstance(inner, VPi):
        return None
    res = force(inner.cod(fresh(10**6 + 1, inner.dom)))
    return res.level if isinstance(res, VUniverse) else None


def _excerpt(s: str, limit: int = 160) -> str:
    s = " ".join(s.split())
    return s if len(s) <= limit else s[: limit - 3] + "..."


# -- module checking ---------------------------------------------------------


@dataclass(frozen=True)
class EntryReport:
    name: str
    path: Optional[str]
    ok: bool
    error: Optional[str]
    footprint: frozenset


@dataclass
class Report:
    entries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def by_name(self) -> dict:
        return {e.name: e for e in self.entries}


def check_module(
    files: list[SourceModule],
    sig: Optional[Signature] = None,
    eta: bool = True,
    trace: Optional[Callable] = None,
) -> tuple[Signature, Report]:
    """Check source modules in order.

    A failing declaration is reported and left out of the signature; later
    declarations are still checked, so ones that use it fail with
    ``UnboundName`` while independent ones are reported normally.
    """
    return run_deep(_check_module, files, sig, eta, trace)


def check_paths(paths, sig=None, eta=True, trace=None):
    """Parse the files at ``paths`` and check them in order."""
    return check_module([parse_file(p) for p in paths], sig, eta, trace)


def _check_module(files, sig, eta, trace):
    checker = Checker(sig, eta=eta, trace=trace)
    report = Report()
    failed: set[str] = set()
    for m in files:
        for sd in m.declarations:
            d = sd.to_declaration()
            deps = sorted(constants(d.type) | (constants(d.body) if d.body is not None else set()))
            broken = [n for n in deps if n in failed]
            try:
                if broken:
                    raise TypeCheckError("UnboundName", f"depends on failed declaration {broken[0]}", d.span)
                checker.check_declaration(d)
            except TypeCheckError as e:
                failed.add(d.name)
                report.entries.append(EntryReport(d.name, m.path, False, str(e), frozenset()))
            else:
                report.entries.append(EntryReport(d.name, m.path, True, None, checker.sig.footprints[d.name]))
    return checker.sig, report


_STACK_SIZE = 512 * 1024 * 1024


def run_deep(fn, *args, **kwargs):
    """Run ``fn`` on a thread with a large stack; the kernel recurses deeply."""
    result: dict = {}

    def target():
        try:
            result["value"] = fn(*args, **kwargs)
        except BaseException as e:  # re-raised in the caller's thread
            result["error"] = e

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 200_000))
    old_size = threading.stack_size()
    threading.stack_size(_STACK_SIZE)
    try:
        t = threading.Thread(target=target)
        t.start()
        t.join()
    finally:
        threading.stack_size(old_size)
    if "error" in result:
        raise result["error"]
    return result["value"]

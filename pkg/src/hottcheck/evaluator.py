"""Normalization by evaluation.

Values use de Bruijn levels; ``readback`` turns levels back into indices.
Every neutral value carries its type so that conversion can stay
type-directed all the way down neutral spines.

Applications of definitions are kept *glued*: the head and arguments are
remembered next to a lazily computed unfolding.  Conversion compares glued
spines first and unfolds only when they differ, which keeps checking of
large proofs from re-normalizing the same definitions over and over.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .core import (
    App,
    Const,
    Id,
    InternalError,
    J,
    Lam,
    Let,
    Pair,
    Pi,
    Proj1,
    Proj2,
    Refl,
    Sigma,
    Term,
    Universe,
    Var,
)

Value = Any
Env = tuple


@dataclass(frozen=True)
class GlobalEntry:
    type: Value
    value: Optional[Value]  # None for axioms

    @property
    def is_axiom(self) -> bool:
        return self.value is None


@dataclass(eq=False)
class Closure:
    env: Env
    body: Term
    globals: dict

    def __call__(self, arg: Value) -> Value:
        return eval_term(self.env + (arg,), self.body, self.globals)


@dataclass(frozen=True, eq=False)
class VUniverse:
    level: int


@dataclass(frozen=True, eq=False)
class VPi:
    name: str
    dom: Value
    cod: Closure


@dataclass(frozen=True, eq=False)
class VLam:
    name: str
    body: Closure


@dataclass(frozen=True, eq=False)
class VSigma:
    name: str
    dom: Value
    cod: Closure


@dataclass(frozen=True, eq=False)
class VPair:
    fst: Value
    snd: Value


@dataclass(frozen=True, eq=False)
class VId:
    type: Value
    lhs: Value
    rhs: Value


@dataclass(frozen=True, eq=False)
class VRefl:
    arg: Value


@dataclass(frozen=True, eq=False)
class VNeutral:
    neutral: "Neutral"
    type: Optional[Value] = field(default=None)


@dataclass(frozen=True, eq=False)
class NVar:
    level: int


@dataclass(frozen=True, eq=False)
class NConst:
    name: str


@dataclass(frozen=True, eq=False)
class NApp:
    fn: VNeutral
    arg: Value


@dataclass(frozen=True, eq=False)
class NProj1:
    pair: VNeutral


@dataclass(frozen=True, eq=False)
class NProj2:
    pair: VNeutral


@dataclass(frozen=True, eq=False)
class NJ:
    type: Value
    base: Value
    motive: Value
    case: Value
    other: Value
    path: VNeutral


Neutral = Any


class VGlued:
    """A definition applied to arguments, unfolded on demand."""

    __slots__ = ("head", "head_type", "args", "_parent", "_value")

    def __init__(self, head: str, head_type: Value, args: tuple, parent=None, value=None):
        self.head = head
        self.head_type = head_type
        self.args = args
        self._parent = parent
        self._value = value

    def unfold(self) -> Value:
        if self._value is None:
            self._value = vapp(force(self._parent), self.args[-1])
        return self._value

    def __repr__(self):
        return f"VGlued({self.head}, {len(self.args)} args)"


def force(v: Value) -> Value:
    """Unfold glued definitions until the head is a real value."""
    while isinstance(v, VGlued):
        v = v.unfold()
    return v


def fresh(level: int, type: Optional[Value]) -> VNeutral:
    return VNeutral(NVar(level), type)


# -- elimination forms -------------------------------------------------------


def vapp(fn: Value, arg: Value) -> Value:
    if isinstance(fn, VLam):
        return fn.body(arg)
    if isinstance(fn, VGlued):
        return VGlued(fn.head, fn.head_type, fn.args + (arg,), parent=fn)
    if isinstance(fn, VNeutral):
        ty = force(fn.type)
        res_ty = ty.cod(arg) if isinstance(ty, VPi) else None
        return VNeutral(NApp(fn, arg), res_ty)
    raise InternalError(f"application of non-function value {type(fn).__name__}")


def vproj1(v: Value) -> Value:
    v = force(v)
    if isinstance(v, VPair):
        return v.fst
    if isinstance(v, VNeutral):
        ty = force(v.type)
        return VNeutral(NProj1(v), ty.dom if isinstance(ty, VSigma) else None)
    raise InternalError(f"projection of non-pair value {type(v).__name__}")


def vproj2(v: Value) -> Value:
    v = force(v)
    if isinstance(v, VPair):
        return v.snd
    if isinstance(v, VNeutral):
        ty = force(v.type)
        res_ty = ty.cod(vproj1(v)) if isinstance(ty, VSigma) else None
        return VNeutral(NProj2(v), res_ty)
    raise InternalError(f"projection of non-pair value {type(v).__name__}")


def vj(A: Value, a: Value, C: Value, d: Value, b: Value, p: Value) -> Value:
    p = force(p)
    if isinstance(p, VRefl):
        return d
    if isinstance(p, VNeutral):
        res_ty = _motive_at(C, b, p)
        return VNeutral(NJ(A, a, C, d, b, p), res_ty)
    raise InternalError(f"J on non-path value {type(p).__name__}")


def _motive_at(C: Value, b: Value, p: Value) -> Optional[Value]:
    if isinstance(C, (VLam, VGlued)) or (isinstance(C, VNeutral) and isinstance(force(C.type), VPi)):
        return vapp(vapp(C, b), p)
    return None


# -- evaluation --------------------------------------------------------------


def eval_term(env: Env, t: Term, globals: dict) -> Value:
    match t:
        case Var(i):
            try:
                return env[len(env) - 1 - i]
            except IndexError:
                raise InternalError(f"unbound index {i} in environment of length {len(env)}")
        case Const(name):
            entry = globals.get(name)
            if entry is None:
                raise InternalError(f"unknown constant {name}")
            if entry.value is None:
                return VNeutral(NConst(name), entry.type)
            return VGlued(name, entry.type, (), value=entry.value)
        case Universe(level):
            return VUniverse(level)
        case Pi(name, dom, cod):
            return VPi(name, eval_term(env, dom, globals), Closure(env, cod, globals))
        case Lam(name, body):
            return VLam(name, Closure(env, body, globals))
        case App(fn, arg):
            return vapp(eval_term(env, fn, globals), eval_term(env, arg, globals))
        case Sigma(name, fst, snd):
            return VSigma(name, eval_term(env, fst, globals), Closure(env, snd, globals))
        case Pair(fst, snd):
            return VPair(eval_term(env, fst, globals), eval_term(env, snd, globals))
        case Proj1(p):
            return vproj1(eval_term(env, p, globals))
        case Proj2(p):
            return vproj2(eval_term(env, p, globals))
        case Id(ty, lhs, rhs):
            return VId(eval_term(env, ty, globals), eval_term(env, lhs, globals), eval_term(env, rhs, globals))
        case Refl(a):
            return VRefl(eval_term(env, a, globals))
        case J(A, a, C, d, b, p):
            ev = lambda x: eval_term(env, x, globals)  # noqa: E731
            return vj(ev(A), ev(a), ev(C), ev(d), ev(b), ev(p))
        case Let(_, _, bound, body):
            return eval_term(env + (eval_term(env, bound, globals),), body, globals)
    raise InternalError(f"cannot evaluate {t!r}")


# -- readback ----------------------------------------------------------------


def readback(depth: int, v: Value, type: Optional[Value] = None, eta: bool = True) -> Term:
    """Read ``v`` back to a normal-form term.

    With a type (and ``eta``) the result is eta-long; without one the value
    is read back structurally, which gives the beta-normal form.
    """
    v = force(v)
    if type is not None:
        type = force(type)
    if type is not None and eta:
        match type:
            case VPi(name, dom, cod):
                x = fresh(depth, dom)
                hint = v.name if isinstance(v, VLam) else name
                return Lam(hint, readback(depth + 1, vapp(v, x), cod(x), eta))
            case VSigma(_, dom, cod):
                a = vproj1(v)
                return Pair(readback(depth, a, dom, eta), readback(depth, vproj2(v), cod(a), eta))
            case VUniverse():
                return readback_type(depth, v, eta)
            case VId(A, _, _) if isinstance(v, VRefl):
                return Refl(readback(depth, v.arg, A, eta))
    match v:
        case VUniverse() | VPi() | VSigma() | VId():
            return readback_type(depth, v, eta)
        case VLam(name, body):
            dom = type.dom if isinstance(type, VPi) else None
            x = fresh(depth, dom)
            cod = type.cod(x) if isinstance(type, VPi) else None
            return Lam(name, readback(depth + 1, body(x), cod, eta))
        case VPair(a, b):
            if isinstance(type, VSigma):
                return Pair(readback(depth, a, type.dom, eta), readback(depth, b, type.cod(a), eta))
            return Pair(readback(depth, a, None, eta), readback(depth, b, None, eta))
        case VRefl(a):
            return Refl(readback(depth, a, type.type if isinstance(type, VId) else None, eta))
        case VNeutral(n, _):
            return readback_neutral(depth, n, eta)
    raise InternalError(f"cannot read back {v!r}")


def readback_type(depth: int, v: Value, eta: bool = True) -> Term:
    match force(v):
        case VUniverse(level):
            return Universe(level)
        case VPi(name, dom, cod):
            x = fresh(depth, dom)
            return Pi(name, readback_type(depth, dom, eta), readback_type(depth + 1, cod(x), eta))
        case VSigma(name, dom, cod):
            x = fresh(depth, dom)
            return Sigma(name, readback_type(depth, dom, eta), readback_type(depth + 1, cod(x), eta))
        case VId(A, lhs, rhs):
            return Id(readback_type(depth, A, eta), readback(depth, lhs, A, eta), readback(depth, rhs, A, eta))
        case VNeutral(n, _):
            return readback_neutral(depth, n, eta)
    raise InternalError(f"value is not a type: {type(v).__name__}")


def readback_neutral(depth: int, n: Neutral, eta: bool = True) -> Term:
    match n:
        case NVar(level):
            return Var(depth - level - 1)
        case NConst(name):
            return Const(name)
        case NApp(fn, arg):
            fty = force(fn.type)
            dom = fty.dom if isinstance(fty, VPi) else None
            return App(readback_neutral(depth, fn.neutral, eta), readback(depth, arg, dom, eta))
        case NProj1(p):
            return Proj1(readback_neutral(depth, p.neutral, eta))
        case NProj2(p):
            return Proj2(readback_neutral(depth, p.neutral, eta))
        case NJ(A, a, C, d, b, p):
            motive_ty = _motive_type(A, a)
            return J(
                readback_type(depth, A, eta),
                readback(depth, a, A, eta),
                readback(depth, C, motive_ty, eta),
                readback(depth, d, _motive_at(C, a, VRefl(a)), eta),
                readback(depth, b, A, eta),
                readback_neutral(depth, p.neutral, eta),
            )
    raise InternalError(f"cannot read back neutral {n!r}")


def _motive_type(A: Value, a: Value) -> Value:
    """The motive's type with its target universe left unknown.

    Readback only needs the binder domains for eta-expansion; the body is a
    type and is read back structurally.
    """
    return VPi("x", A, HostClosure(lambda x: VPi("p", VId(A, a, x), HostClosure(lambda _p: None))))


@dataclass(frozen=True, eq=False)
class HostClosure:
    """A closure implemented by a Python function (used for synthesized types)."""

    fn: Any

    def __call__(self, arg: Value) -> Value:
        return self.fn(arg)


def normalize(t: Term, globals: dict, env: Env = (), type: Optional[Value] = None, eta: bool = True) -> Term:
    return readback(len(env), eval_term(env, t, globals), type, eta)


# -- conversion --------------------------------------------------------------


class Conversion:
    """Type-directed definitional equality.

    ``eta=False`` disables the eta rules for Pi and Sigma, which is only
    useful for differential testing of the kernel.
    """

    def __init__(self, eta: bool = True):
        self.eta = eta

    def conv(self, depth: int, v: Value, w: Value, ty: Value) -> bool:
        if v is w:
            return True
        if isinstance(v, VGlued) and isinstance(w, VGlued) and self._conv_spines(depth, v, w):
            return True
        match force(ty):
            case VPi(_, dom, cod):
                if not self.eta:
                    return self._conv_untyped_fn(depth, v, w, dom, cod)
                x = fresh(depth, dom)
                return self.conv(depth + 1, vapp(v, x), vapp(w, x), cod(x))
            case VSigma(_, dom, cod):
                if not self.eta and not (isinstance(v, VPair) and isinstance(w, VPair)):
                    return self._conv_neutral_values(depth, v, w)
                a, b = vproj1(v), vproj1(w)
                return self.conv(depth, a, b, dom) and self.conv(depth, vproj2(v), vproj2(w), cod(a))
            case VUniverse():
                return self.conv_type(depth, v, w)
            case VId(A, _, _):
                v, w = force(v), force(w)
                if isinstance(v, VRefl) and isinstance(w, VRefl):
                    return self.conv(depth, v.arg, w.arg, A)
                return self._conv_neutral_values(depth, v, w)
        # Elements of a neutral type are themselves neutral.
        return self._conv_neutral_values(depth, v, w)

    def _conv_untyped_fn(self, depth, v, w, dom, cod) -> bool:
        v, w = force(v), force(w)
        if isinstance(v, VLam) and isinstance(w, VLam):
            x = fresh(depth, dom)
            return self.conv(depth + 1, v.body(x), w.body(x), cod(x))
        return self._conv_neutral_values(depth, v, w)

    def _conv_spines(self, depth: int, v: VGlued, w: VGlued) -> bool:
        """Same definition applied to convertible arguments (a sound shortcut)."""
        if v.head != w.head or len(v.args) != len(w.args):
            return False
        ty = v.head_type
        for a, b in zip(v.args, w.args):
            ty = force(ty)
            if not isinstance(ty, VPi) or not self.conv(depth, a, b, ty.dom):
                return False
            ty = ty.cod(a)
        return True

    def _conv_neutral_values(self, depth, v, w) -> bool:
        v, w = force(v), force(w)
        if isinstance(v, VNeutral) and isinstance(w, VNeutral):
            return self.conv_neutral(depth, v.neutral, w.neutral)
        return False

    def conv_type(self, depth: int, a: Value, b: Value) -> bool:
        if a is b:
            return True
        if isinstance(a, VGlued) and isinstance(b, VGlued) and self._conv_spines(depth, a, b):
            return True
        match force(a), force(b):
            case VUniverse(i), VUniverse(j):
                return i == j
            case VPi(_, d1, c1), VPi(_, d2, c2):
                if not self.conv_type(depth, d1, d2):
                    return False
                x = fresh(depth, d1)
                return self.conv_type(depth + 1, c1(x), c2(x))
            case VSigma(_, d1, c1), VSigma(_, d2, c2):
                if not self.conv_type(depth, d1, d2):
                    return False
                x = fresh(depth, d1)
                return self.conv_type(depth + 1, c1(x), c2(x))
            case VId(t1, l1, r1), VId(t2, l2, r2):
                return self.conv_type(depth, t1, t2) and self.conv(depth, l1, l2, t1) and self.conv(depth, r1, r2, t1)
            case VNeutral(n1, _), VNeutral(n2, _):
                return self.conv_neutral(depth, n1, n2)
        return False

    def conv_neutral(self, depth: int, n: Neutral, m: Neutral) -> bool:
        if n is m:
            return True
        match n, m:
            case NVar(i), NVar(j):
                return i == j
            case NConst(a), NConst(b):
                return a == b
            case NApp(f1, a1), NApp(f2, a2):
                if not self.conv_neutral(depth, f1.neutral, f2.neutral):
                    return False
                ty = force(f1.type)
                if isinstance(ty, VPi):
                    return self.conv(depth, a1, a2, ty.dom)
                return self._conv_untyped(depth, a1, a2)
            case NProj1(p1), NProj1(p2):
                return self.conv_neutral(depth, p1.neutral, p2.neutral)
            case NProj2(p1), NProj2(p2):
                return self.conv_neutral(depth, p1.neutral, p2.neutral)
            case NJ(A1, a1, C1, d1, b1, p1), NJ(A2, a2, C2, d2, b2, p2):
                if not (self.conv_type(depth, A1, A2) and self.conv(depth, a1, a2, A1)):
                    return False
                x = fresh(depth, A1)
                p = fresh(depth + 1, VId(A1, a1, x))
                if not self.conv_type(depth + 2, vapp(vapp(C1, x), p), vapp(vapp(C2, x), p)):
                    return False
                return (
                    self.conv(depth, d1, d2, vapp(vapp(C1, a1), VRefl(a1)))
                    and self.conv(depth, b1, b2, A1)
                    and self.conv_neutral(depth, p1.neutral, p2.neutral)
                )
        return False

    def _conv_untyped(self, depth, v, w) -> bool:
        # Only reached for spines whose head type is unknown (untyped tests).
        return readback(depth, v, None, False) == readback(depth, w, None, False)


def conv(depth: int, v: Value, w: Value, type: Value, eta: bool = True) -> bool:
    return Conversion(eta).conv(depth, v, w, type)

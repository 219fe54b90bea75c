"""Translations between the calculi and a few static analyses on types."""

from __future__ import annotations

import itertools
from typing import TypeVar

from dcc.lattice import Index, IndexLattice
from dcc.normalize import normalize_type
from dcc.syntax import (
    Abs,
    App,
    Bind,
    Case,
    Fun,
    Inj,
    Open,
    Pair,
    Prod,
    Proj,
    Strong,
    StrongRet,
    Sum,
    Taint,
    Term,
    Type,
    UnitT,
    UnitV,
    Var,
    Weak,
    WeakRet,
    Weaken,
    all_vars,
    fresh,
    map_children,
    map_type,
    show_type,
    type_children,
    type_indices,
)

X = TypeVar("X", Term, Type)


class TransformError(Exception):
    pass


class NonDccConstruct(TransformError):
    pass


class NonDccdConstruct(TransformError):
    pass


class UnsupportedLeakType(TransformError):
    pass


# ------------------------------------------------------------ [[.]]


def weaken_translate(x: X) -> X:
    """Replace every strong protection by its weak counterpart."""
    if isinstance(x, Type):
        return _weaken_type(x)  # type: ignore[return-value]
    return _weaken_term(x)  # type: ignore[return-value]


def _weaken_type(t: Type) -> Type:
    def node(u: Type) -> Type:
        if isinstance(u, (Weak, Open)):
            raise NonDccConstruct(f"{type(u).__name__} type in a DCC translation input")
        return Weak(u.index, u.body) if isinstance(u, Strong) else u

    return map_type(t, node)


def _weaken_term(e: Term) -> Term:
    if isinstance(e, (WeakRet, Weaken, Taint)):
        raise NonDccConstruct(f"{type(e).__name__} in a DCC translation input")
    if isinstance(e, StrongRet):
        return WeakRet(e.index, _weaken_term(e.body))
    if isinstance(e, Abs):
        return Abs(e.var, _weaken_type(e.ann), _weaken_term(e.body))
    return map_children(e, _weaken_term)


# ------------------------------------------------------------ {{.}}


def volpano_translate(x: X) -> X:
    """Strengthen weak protections; a taint ``e @ l`` becomes ``bind w = eta[l] e in w``."""
    if isinstance(x, Type):
        return _volpano_type(x)  # type: ignore[return-value]
    return _volpano_term(x)  # type: ignore[return-value]


def _volpano_type(t: Type) -> Type:
    def node(u: Type) -> Type:
        if isinstance(u, Strong):
            raise NonDccdConstruct("T[.] type in a DCC^d translation input")
        if isinstance(u, Open):
            raise NonDccdConstruct(f"open type {show_type(u)} has no DCC image")
        return Strong(u.index, u.body) if isinstance(u, Weak) else u

    return map_type(t, node)


def _volpano_term(e: Term) -> Term:
    if isinstance(e, (StrongRet, Weaken)):
        raise NonDccdConstruct(f"{type(e).__name__} in a DCC^d translation input")
    if isinstance(e, WeakRet):
        return StrongRet(e.index, _volpano_term(e.body))
    if isinstance(e, Taint):
        body = _volpano_term(e.body)
        avoid = all_vars(body)
        w = "w" if "w" not in avoid else fresh("w", avoid)
        return Bind(w, StrongRet(e.index, body), Var(w))
    if isinstance(e, Abs):
        return Abs(e.var, _volpano_type(e.ann), _volpano_term(e.body))
    return map_children(e, _volpano_term)


# ------------------------------------------------------------ type analyses


def erase(t: Type) -> Type:
    return map_type(t, lambda u: u.body if isinstance(u, Open) else u)


def has_negative_protection(t: Type, positive: bool = True) -> bool:
    if isinstance(t, (Strong, Weak)) and not positive:
        return True
    if isinstance(t, Fun):
        return has_negative_protection(t.dom, not positive) or has_negative_protection(t.cod, positive)
    return any(has_negative_protection(c, positive) for c in type_children(t))


def blame_of(t: Type, lat: IndexLattice) -> Index:
    """Join, in the blame order, of every blame component occurring in ``t``."""
    b = lat.blame_bottom
    for i in type_indices(t):
        b = lat.blame_join(b, i.blame)
    return lat.beta(b)


# ------------------------------------------------------------ leak family


def leak_gen(l: Index, t: Type, lat: IndexLattice) -> Term:
    """A term of type ``W[l](t) -> erase(t)`` built by destructing and rebuilding."""
    names = itertools.count()

    def var(base: str) -> str:
        return f"{base}{next(names)}"

    def gen(l: Index, t: Type) -> Term:
        ann = Weak(l, t)
        x = var("x")
        if isinstance(t, UnitT):
            return Abs(x, ann, UnitV())
        if isinstance(t, Prod):
            y = var("y")
            return Abs(x, ann, Bind(y, Var(x), Pair(
                App(gen(l, t.left), WeakRet(l, Proj(1, Var(y)))),
                App(gen(l, t.right), WeakRet(l, Proj(2, Var(y)))),
            )))  # fmt: skip
        if isinstance(t, (Sum, Open)):
            q = t.index if isinstance(t, Open) else lat.bottom
            s = t.body if isinstance(t, Open) else t
            if not isinstance(s, Sum):
                raise UnsupportedLeakType(f"qualified non-sum {show_type(t, lat)}")
            lq = lat.join(l, q)
            y, z = var("y"), var("z")
            return Abs(x, ann, Bind(y, Var(x), Case(
                Var(y),
                z,
                Inj(1, App(gen(lq, s.left), WeakRet(lq, Var(z)))),
                Inj(2, App(gen(lq, s.right), WeakRet(lq, Var(z)))),
            )))  # fmt: skip
        if isinstance(t, Fun):
            z, f = var("z"), var("f")
            return Abs(x, ann, Abs(z, t.dom, Bind(f, Var(x), App(gen(l, t.cod), WeakRet(l, App(Var(f), Var(z)))))))
        if isinstance(t, Weak):
            y = var("y")
            return Abs(x, ann, Bind(y, Var(x), WeakRet(t.index, App(gen(t.index, t.body), Var(y)))))
        raise UnsupportedLeakType(f"no leak case for {show_type(t, lat)}")

    return gen(l, normalize_type(t, lat))


def identity_leak(l: Index, t: Type) -> Term:
    """The direct attempt ``fun x:W[l](t). bind y = x in y``."""
    return Abs("x", Weak(l, t), Bind("y", Var("x"), Var("y")))


# ------------------------------------------------------------ taints


def erase_taints(e: Term) -> Term:
    if isinstance(e, Taint):
        return erase_taints(e.body)
    return map_children(e, erase_taints)


__all__ = [
    "NonDccConstruct",
    "NonDccdConstruct",
    "TransformError",
    "UnsupportedLeakType",
    "blame_of",
    "erase",
    "erase_taints",
    "has_negative_protection",
    "identity_leak",
    "leak_gen",
    "volpano_translate",
    "weaken_translate",
]

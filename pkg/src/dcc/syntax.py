"""Abstract syntax for types and terms, substitution, and the printer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from dcc.lattice import Index, IndexLattice


@dataclass(frozen=True)
class Span:
    start: int
    end: int


def _span() -> Optional[Span]:
    return field(default=None, compare=False, repr=False, kw_only=True)  # type: ignore[return-value]


# ---------------------------------------------------------------- types


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class UnitT(Type):
    pass


@dataclass(frozen=True)
class Prod(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Sum(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Fun(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class Strong(Type):
    """``T[l](s)``: protection against explicit and implicit flows."""

    index: Index
    body: Type


@dataclass(frozen=True)
class Weak(Type):
    """``W[l](s)``: protection against explicit flows only."""

    index: Index
    body: Type


@dataclass(frozen=True)
class Open(Type):
    """``s ^ l``: a pending weak-protection requirement."""

    body: Type
    index: Index


@dataclass(frozen=True)
class Meta(Type):
    """Unification variable; only ever produced inside the checker."""

    id: int


UNIT = UnitT()


def type_children(t: Type) -> tuple[Type, ...]:
    if isinstance(t, (Prod, Sum)):
        return (t.left, t.right)
    if isinstance(t, Fun):
        return (t.dom, t.cod)
    if isinstance(t, (Strong, Weak, Open)):
        return (t.body,)
    return ()


def type_size(t: Type) -> int:
    """Number of constructors, qualifiers excluded."""
    if isinstance(t, Open):
        return type_size(t.body)
    return 1 + sum(type_size(c) for c in type_children(t))


def type_height(t: Type) -> int:
    if isinstance(t, Open):
        return type_height(t.body)
    return 1 + max((type_height(c) for c in type_children(t)), default=0)


def type_indices(t: Type) -> Iterator[Index]:
    if isinstance(t, (Strong, Weak, Open)):
        yield t.index
    for c in type_children(t):
        yield from type_indices(c)


def is_first_order(t: Type) -> bool:
    if isinstance(t, Fun):
        return False
    return all(is_first_order(c) for c in type_children(t))


def map_type(t: Type, f: Callable[[Type], Type]) -> Type:
    """Rebuild ``t`` bottom-up, applying ``f`` to every node."""
    if isinstance(t, Prod):
        return f(Prod(map_type(t.left, f), map_type(t.right, f)))
    if isinstance(t, Sum):
        return f(Sum(map_type(t.left, f), map_type(t.right, f)))
    if isinstance(t, Fun):
        return f(Fun(map_type(t.dom, f), map_type(t.cod, f)))
    if isinstance(t, Strong):
        return f(Strong(t.index, map_type(t.body, f)))
    if isinstance(t, Weak):
        return f(Weak(t.index, map_type(t.body, f)))
    if isinstance(t, Open):
        return f(Open(map_type(t.body, f), t.index))
    return f(t)


# ---------------------------------------------------------------- terms


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class UnitV(Term):
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Var(Term):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Abs(Term):
    var: str
    ann: Type
    body: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Proj(Term):
    i: int
    body: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Inj(Term):
    i: int
    body: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Case(Term):
    scrut: Term
    var: str
    left: Term
    right: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class StrongRet(Term):
    index: Index
    body: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class WeakRet(Term):
    index: Index
    body: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Bind(Term):
    var: str
    bound: Term
    body: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Weaken(Term):
    body: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Taint(Term):
    """Internal run-time mark ``e @ l``."""

    body: Term
    index: Index
    span: Optional[Span] = _span()


UNITV = UnitV()

VALUE_FORMS = (UnitV, Abs, Pair, Inj, StrongRet, WeakRet)


def is_value(e: Term) -> bool:
    """Weak-head values, including tainted weak-head values."""
    while isinstance(e, Taint):
        e = e.body
    return isinstance(e, VALUE_FORMS)


def children(e: Term) -> tuple[Term, ...]:
    if isinstance(e, (Abs, Proj, Inj, StrongRet, WeakRet, Weaken, Taint)):
        return (e.body,)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, Pair):
        return (e.left, e.right)
    if isinstance(e, Case):
        return (e.scrut, e.left, e.right)
    if isinstance(e, Bind):
        return (e.bound, e.body)
    return ()


def size(e: Term) -> int:
    """AST node count; type annotations are not counted."""
    return 1 + sum(size(c) for c in children(e))


def subterms(e: Term) -> Iterator[Term]:
    yield e
    for c in children(e):
        yield from subterms(c)


def free_vars(e: Term) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Abs):
        return free_vars(e.body) - {e.var}
    if isinstance(e, Case):
        return free_vars(e.scrut) | ((free_vars(e.left) | free_vars(e.right)) - {e.var})
    if isinstance(e, Bind):
        return free_vars(e.bound) | (free_vars(e.body) - {e.var})
    out: frozenset[str] = frozenset()
    for c in children(e):
        out |= free_vars(c)
    return out


def all_vars(e: Term) -> set[str]:
    out: set[str] = set()
    for s in subterms(e):
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, (Abs, Case, Bind)):
            out.add(s.var)
    return out


def fresh(base: str, avoid: set[str] | frozenset[str]) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def map_children(e: Term, f: Callable[[Term], Term]) -> Term:
    """Apply ``f`` to the immediate subterms (binders untouched)."""
    if isinstance(e, Abs):
        return Abs(e.var, e.ann, f(e.body))
    if isinstance(e, App):
        return App(f(e.fn), f(e.arg))
    if isinstance(e, Pair):
        return Pair(f(e.left), f(e.right))
    if isinstance(e, Proj):
        return Proj(e.i, f(e.body))
    if isinstance(e, Inj):
        return Inj(e.i, f(e.body))
    if isinstance(e, Case):
        return Case(f(e.scrut), e.var, f(e.left), f(e.right))
    if isinstance(e, StrongRet):
        return StrongRet(e.index, f(e.body))
    if isinstance(e, WeakRet):
        return WeakRet(e.index, f(e.body))
    if isinstance(e, Bind):
        return Bind(e.var, f(e.bound), f(e.body))
    if isinstance(e, Weaken):
        return Weaken(f(e.body))
    if isinstance(e, Taint):
        return Taint(f(e.body), e.index)
    return e


def subst(e: Term, x: str, v: Term) -> Term:
    """Capture-avoiding ``e[v/x]``."""
    fv = free_vars(v)
    return _subst(e, x, v, fv)


def _subst(e: Term, x: str, v: Term, fv: frozenset[str]) -> Term:
    if isinstance(e, Var):
        return v if e.name == x else e
    if isinstance(e, UnitV):
        return e
    if isinstance(e, Abs):
        if e.var == x:
            return e
        var, body = _rename_binder(e.var, e.body, x, v, fv)
        return Abs(var, e.ann, _subst(body, x, v, fv))
    if isinstance(e, Case):
        scrut = _subst(e.scrut, x, v, fv)
        if e.var == x:
            return Case(scrut, e.var, e.left, e.right)
        var, left, right = e.var, e.left, e.right
        if var in fv and (x in free_vars(left) or x in free_vars(right)):
            var = fresh(var, fv | all_vars(left) | all_vars(right) | {x})
            left = subst(left, e.var, Var(var))
            right = subst(right, e.var, Var(var))
        return Case(scrut, var, _subst(left, x, v, fv), _subst(right, x, v, fv))
    if isinstance(e, Bind):
        bound = _subst(e.bound, x, v, fv)
        if e.var == x:
            return Bind(e.var, bound, e.body)
        var, body = _rename_binder(e.var, e.body, x, v, fv)
        return Bind(var, bound, _subst(body, x, v, fv))
    return map_children(e, lambda c: _subst(c, x, v, fv))


def _rename_binder(var: str, body: Term, x: str, v: Term, fv: frozenset[str]) -> tuple[str, Term]:
    if var not in fv or x not in free_vars(body):
        return var, body
    new = fresh(var, fv | all_vars(body) | {x})
    return new, subst(body, var, Var(new))


def alpha_key(e: Term, env: tuple[str, ...] = ()) -> object:
    """Hashable representative of the alpha-equivalence class of ``e``."""
    if isinstance(e, Var):
        for depth, name in enumerate(reversed(env)):
            if name == e.name:
                return ("b", depth)
        return ("f", e.name)
    if isinstance(e, Abs):
        return ("abs", e.ann, alpha_key(e.body, env + (e.var,)))
    if isinstance(e, Case):
        inner = env + (e.var,)
        return ("case", alpha_key(e.scrut, env), alpha_key(e.left, inner), alpha_key(e.right, inner))
    if isinstance(e, Bind):
        return ("bind", alpha_key(e.bound, env), alpha_key(e.body, env + (e.var,)))
    tag: tuple = (type(e).__name__,)
    if isinstance(e, (Proj, Inj)):
        tag += (e.i,)
    if isinstance(e, (StrongRet, WeakRet, Taint)):
        tag += (e.index,)
    return tag + tuple(alpha_key(c, env) for c in children(e))


def alpha_eq(e1: Term, e2: Term, lat: IndexLattice | None = None) -> bool:
    """Equality up to bound-variable renaming.

    With a lattice, taints and embedded type annotations are normalized
    first, so ``inj1 () @ Bot`` equals ``inj1 ()``.
    """
    if lat is not None:
        from dcc.normalize import normalize_annotations, normalize_taint

        e1 = normalize_taint(normalize_annotations(e1, lat), lat)
        e2 = normalize_taint(normalize_annotations(e2, lat), lat)
    return alpha_key(e1) == alpha_key(e2)


# ---------------------------------------------------------------- printing


def show_index(i: Index, lat: IndexLattice | None, bracket: bool = False) -> str:
    if lat is None:
        text = i.level if i.blame in ("", None) else f"{i.level},!{i.blame}"
    else:
        text = lat.show(i)
    if bracket and "," in text:
        return f"[{text}]"
    return text


_TPREC = {Fun: 1, Sum: 2, Prod: 3, Open: 4}
_TOP = {Fun: "->", Sum: "+", Prod: "*"}


def show_type(t: Type, lat: IndexLattice | None = None, prec: int = 0) -> str:
    if isinstance(t, UnitT):
        return "unit"
    if isinstance(t, Meta):
        return f"?{t.id}"
    if isinstance(t, (Strong, Weak)):
        ctor = "T" if isinstance(t, Strong) else "W"
        return f"{ctor}[{show_index(t.index, lat)}]({show_type(t.body, lat)})"
    if isinstance(t, Open):
        return f"{show_type(t.body, lat, 5)}^{show_index(t.index, lat, True)}"
    p = _TPREC[type(t)]
    left, right = type_children(t)
    text = f"{show_type(left, lat, p + 1)} {_TOP[type(t)]} {show_type(right, lat, p)}"
    return f"({text})" if p < prec else text


def _term_prec(e: Term) -> int:
    if isinstance(e, (Abs, Case, Bind)):
        return 0
    if isinstance(e, Taint):
        return 1
    if isinstance(e, App):
        return 2
    if isinstance(e, (Proj, Inj, StrongRet, WeakRet, Weaken)):
        return 3
    return 4


def show_term(e: Term, lat: IndexLattice | None = None, prec: int = 0) -> str:
    text = _show_term(e, lat)
    return f"({text})" if _term_prec(e) < prec else text


def _show_term(e: Term, lat: IndexLattice | None) -> str:
    s = lambda t, p: show_term(t, lat, p)  # noqa: E731
    if isinstance(e, UnitV):
        return "()"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Abs):
        return f"fun {e.var}:{show_type(e.ann, lat)}. {s(e.body, 0)}"
    if isinstance(e, Case):
        return f"case {s(e.scrut, 1)} of {e.var}. {s(e.left, 0)} | {e.var}. {s(e.right, 0)}"
    if isinstance(e, Bind):
        return f"bind {e.var} = {s(e.bound, 1)} in {s(e.body, 0)}"
    if isinstance(e, Taint):
        return f"{s(e.body, 2)} @ {show_index(e.index, lat, True)}"
    if isinstance(e, App):
        return f"{s(e.fn, 2)} {s(e.arg, 4)}"
    if isinstance(e, Proj):
        return f"proj{e.i} {s(e.body, 3)}"
    if isinstance(e, Inj):
        return f"inj{e.i} {s(e.body, 3)}"
    if isinstance(e, StrongRet):
        return f"eta[{show_index(e.index, lat)}] {s(e.body, 3)}"
    if isinstance(e, WeakRet):
        return f"weta[{show_index(e.index, lat)}] {s(e.body, 3)}"
    if isinstance(e, Weaken):
        return f"weaken {s(e.body, 3)}"
    if isinstance(e, Pair):
        return f"({s(e.left, 0)}, {s(e.right, 0)})"
    raise TypeError(f"not a term: {e!r}")

"""Executable indistinguishability and safety, plus the value enumerator.

The universally quantified function cases are bounded by ``enum_values``
at the argument type; arguments of higher-order type are refused rather
than approximated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

from dcc.evaluate import DEFAULT_FUEL, evaluate
from dcc.lattice import Index, IndexLattice
from dcc.normalize import normalize_type, taint as add_taint
from dcc.syntax import (
    UNITV,
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
    alpha_key,
    is_first_order,
    show_term,
    show_type,
)


class OracleError(Exception):
    pass


class UnsupportedType(OracleError):
    pass


class DepthTooSmall(OracleError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    depth: int = 4
    fuel: int = DEFAULT_FUEL
    max_table: int = 4096  # cap on tabulated functions per arrow type


# ------------------------------------------------------------ enumeration


def enum_values(t: Type, lat: IndexLattice, depth: int = 4, cfg: OracleConfig | None = None) -> list[Term]:
    cfg = cfg or OracleConfig(depth=depth)
    out = _Enum(lat, cfg).values(normalize_type(t, lat), depth)
    if not out:
        raise DepthTooSmall(f"no values of {show_type(t, lat)} at depth {depth}")
    return out


class _Enum:
    def __init__(self, lat: IndexLattice, cfg: OracleConfig):
        self.lat = lat
        self.cfg = cfg
        self.counter = itertools.count()

    def values(self, t: Type, depth: int) -> list[Term]:
        if depth <= 0:
            return []
        if isinstance(t, UnitT):
            return [UNITV]
        if isinstance(t, Prod):
            lefts = self.values(t.left, depth - 1)
            rights = self.values(t.right, depth - 1)
            return [Pair(a, b) for a in lefts for b in rights]
        if isinstance(t, Sum):
            return [Inj(1, v) for v in self.values(t.left, depth - 1)] + [
                Inj(2, v) for v in self.values(t.right, depth - 1)
            ]
        if isinstance(t, Strong):
            return [StrongRet(t.index, v) for v in self.values(t.body, depth - 1)]
        if isinstance(t, Weak):
            return [WeakRet(t.index, v) for v in self.values(t.body, depth - 1)]
        if isinstance(t, Open):
            return _dedup(add_taint(v, t.index, self.lat) for v in self.values(t.body, depth))
        if isinstance(t, Fun):
            return self.functions(t, depth)
        raise UnsupportedType(f"cannot enumerate {show_type(t, self.lat)}")

    def functions(self, t: Fun, depth: int) -> list[Term]:
        if not is_first_order(t.dom):
            raise UnsupportedType(f"higher-order argument type {show_type(t.dom, self.lat)}")
        dom = self.values(t.dom, depth - 1)
        cod = self.values(t.cod, depth - 1)
        if not dom or not cod:
            return []
        if len(cod) ** len(dom) > self.cfg.max_table:
            raise UnsupportedType(f"{len(cod)}^{len(dom)} tabulated functions at {show_type(t, self.lat)}")
        keys = [alpha_key(v) for v in dom]
        out = []
        for image in itertools.product(cod, repeat=len(dom)):
            table = dict(zip(keys, image))
            x = self.fresh()
            out.append(Abs(x, t.dom, self.dispatch(Var(x), t.dom, lambda v: table[alpha_key(v)])))
        return out

    def fresh(self) -> str:
        return f"a{next(self.counter)}"

    def dispatch(self, x: Term, s: Type, f: Callable[[Term], Term]) -> Term:
        """A term that inspects ``x : s`` and returns ``f`` of its value."""
        if isinstance(s, UnitT):
            return f(UNITV)
        if isinstance(s, Prod):
            return self.dispatch(
                Proj(1, x), s.left, lambda a: self.dispatch(Proj(2, x), s.right, lambda b: f(Pair(a, b)))
            )
        if isinstance(s, (Sum, Open)):
            q = s.index if isinstance(s, Open) else None
            body = s.body if isinstance(s, Open) else s
            assert isinstance(body, Sum)

            def wrap(v: Term) -> Term:
                return v if q is None else add_taint(v, q, self.lat)

            z = self.fresh()
            return Case(
                x,
                z,
                self.dispatch(Var(z), body.left, lambda v: f(wrap(Inj(1, v)))),
                self.dispatch(Var(z), body.right, lambda v: f(wrap(Inj(2, v)))),
            )
        if isinstance(s, (Strong, Weak)):
            z = self.fresh()
            ret = StrongRet if isinstance(s, Strong) else WeakRet
            return Bind(z, x, self.dispatch(Var(z), s.body, lambda v: f(ret(s.index, v))))
        raise UnsupportedType(f"cannot inspect values of {show_type(s, self.lat)}")


def _dedup(terms: Iterator[Term] | list[Term]) -> list[Term]:
    seen: set[object] = set()
    out = []
    for e in terms:
        k = alpha_key(e)
        if k not in seen:
            seen.add(k)
            out.append(e)
    return out


def _strip(v: Term) -> Term:
    while isinstance(v, Taint):
        v = v.body
    return v


# ------------------------------------------------------------ relations


def indistinguishable(
    e1: Term, e2: Term, t: Type, l: Index, lat: IndexLattice, cfg: OracleConfig | None = None
) -> bool:
    """``e1 ~_l e2 : t``, evaluating without taints."""
    cfg = cfg or OracleConfig()
    return _Related(lat, l, cfg).rel(e1, e2, normalize_type(t, lat))


class _Related:
    def __init__(self, lat: IndexLattice, l: Index, cfg: OracleConfig):
        self.lat = lat
        self.l = l
        self.cfg = cfg
        self.args: dict[Type, list[Term]] = {}

    def arg_values(self, s: Type) -> list[Term]:
        if s not in self.args:
            if not is_first_order(s):
                raise UnsupportedType(f"higher-order argument type {show_type(s, self.lat)}")
            self.args[s] = enum_values(s, self.lat, self.cfg.depth, self.cfg)
        return self.args[s]

    def rel(self, e1: Term, e2: Term, t: Type) -> bool:
        lat = self.lat
        if isinstance(t, Open):
            if not lat.leq(t.index, self.l):
                return True
            t = t.body
        if isinstance(t, UnitT):
            return True
        if isinstance(t, (Strong, Weak)) and not lat.leq(t.index, self.l):
            return True
        v1 = _strip(evaluate(e1, lat, False, self.cfg.fuel))
        v2 = _strip(evaluate(e2, lat, False, self.cfg.fuel))
        if isinstance(t, Prod):
            assert isinstance(v1, Pair) and isinstance(v2, Pair)
            return self.rel(v1.left, v2.left, t.left) and self.rel(v1.right, v2.right, t.right)
        if isinstance(t, Sum):
            assert isinstance(v1, Inj) and isinstance(v2, Inj)
            if v1.i != v2.i:
                return False
            return self.rel(v1.body, v2.body, t.left if v1.i == 1 else t.right)
        if isinstance(t, (Strong, Weak)):
            assert isinstance(v1, (StrongRet, WeakRet)) and isinstance(v2, (StrongRet, WeakRet))
            return self.rel(v1.body, v2.body, t.body)
        if isinstance(t, Fun):
            args = self.arg_values(t.dom)
            for a1 in args:
                for a2 in args:
                    if self.rel(a1, a2, t.dom) and not self.rel(App(v1, a1), App(v2, a2), t.cod):
                        return False
            return True
        raise UnsupportedType(f"no relation at {show_type(t, lat)}")


def safe(e: Term, t: Type, l: Index, lat: IndexLattice, cfg: OracleConfig | None = None) -> bool:
    """``e |>_l : t``, evaluating with taint propagation."""
    cfg = cfg or OracleConfig()
    return _Safety(lat, l, cfg).safe(e, normalize_type(t, lat))


class _Safety:
    def __init__(self, lat: IndexLattice, l: Index, cfg: OracleConfig):
        self.lat = lat
        self.l = l
        self.cfg = cfg
        self.args: dict[Type, list[Term]] = {}

    def safe_args(self, s: Type) -> list[Term]:
        if s not in self.args:
            if not is_first_order(s):
                raise UnsupportedType(f"higher-order argument type {show_type(s, self.lat)}")
            base = enum_values(s, self.lat, self.cfg.depth, self.cfg)
            taints = [q for q in self.lat.indices() if q != self.lat.bottom and self.lat.leq(q, self.l)]
            cands = _dedup(list(base) + [add_taint(v, q, self.lat) for v in base for q in taints])
            self.args[s] = [a for a in cands if self.safe(a, s)]
        return self.args[s]

    def safe(self, e: Term, t: Type) -> bool:
        lat = self.lat
        v = evaluate(e, lat, True, self.cfg.fuel)
        return self.safe_value(v, t)

    def safe_value(self, v: Term, t: Type) -> bool:
        lat = self.lat
        if isinstance(v, Taint):
            if not lat.leq(v.index, self.l):
                return False
            return self.safe_value(v.body, t)
        if isinstance(t, Open):
            t = t.body
        if isinstance(t, UnitT):
            return isinstance(v, UnitV)
        if isinstance(t, Prod):
            assert isinstance(v, Pair)
            return self.safe(v.left, t.left) and self.safe(v.right, t.right)
        if isinstance(t, Sum):
            assert isinstance(v, Inj)
            return self.safe(v.body, t.left if v.i == 1 else t.right)
        if isinstance(t, (Strong, Weak)):
            assert isinstance(v, (StrongRet, WeakRet))
            return not lat.leq(t.index, self.l) or self.safe(v.body, t.body)
        if isinstance(t, Fun):
            return all(self.safe(App(v, a), t.cod) for a in self.safe_args(t.dom))
        raise UnsupportedType(f"no safety rule at {show_type(t, lat)}")


# ------------------------------------------------------------ brute force


def observation_contexts(t: Type, l: Index, lat: IndexLattice, depth: int = 3) -> list[Callable[[Term], Term]]:
    """Observers of ``t`` at ``l`` built from proj, case and bind.

    Each context maps a term to a tree of injections whose shape records
    the branches taken; binds only open protections visible at ``l``.
    """
    t = normalize_type(t, lat)
    counter = itertools.count()

    def build(t: Type, d: int) -> list[Callable[[Term], Term]]:
        out: list[Callable[[Term], Term]] = [lambda e: UNITV]
        if d == 0:
            return out
        if isinstance(t, Prod):
            for c in build(t.left, d - 1):
                out.append(lambda e, c=c: c(Proj(1, e)))
            for c in build(t.right, d - 1):
                out.append(lambda e, c=c: c(Proj(2, e)))
        elif isinstance(t, Sum) or (isinstance(t, Open) and lat.leq(t.index, l)):
            s = t.body if isinstance(t, Open) else t
            assert isinstance(s, Sum)
            for ca in build(s.left, d - 1):
                for cb in build(s.right, d - 1):
                    z = f"o{next(counter)}"
                    out.append(
                        lambda e, ca=ca, cb=cb, z=z: Case(e, z, Inj(1, ca(Var(z))), Inj(2, cb(Var(z))))
                    )
        elif isinstance(t, (Strong, Weak)) and lat.leq(t.index, l):
            for c in build(t.body, d - 1):
                z = f"o{next(counter)}"
                out.append(lambda e, c=c, z=z: Bind(z, e, c(Var(z))))
        elif isinstance(t, Fun):
            raise UnsupportedType("observation contexts are built for first-order types only")
        return out

    return build(t, depth)


def read_outcome(e: Term, lat: IndexLattice, fuel: int = DEFAULT_FUEL) -> object:
    """The injection tree an observation context produced."""
    v = _strip(evaluate(e, lat, False, fuel))
    if isinstance(v, Inj):
        return (v.i, read_outcome(v.body, lat, fuel))
    if isinstance(v, UnitV):
        return ()
    raise OracleError(f"observation produced {show_term(v, lat)}")


def brute_force_distinguishable(
    e1: Term, e2: Term, t: Type, l: Index, lat: IndexLattice, depth: int = 3
) -> bool:
    for ctx in observation_contexts(t, l, lat, depth):
        if read_outcome(ctx(e1), lat) != read_outcome(ctx(e2), lat):
            return True
    return False

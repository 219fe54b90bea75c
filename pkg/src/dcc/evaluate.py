"""Call-by-name, leftmost-outermost evaluation to weak-head values.

With ``taint=True`` a bind on a protected value substitutes the payload
tainted at the protection index, and a case on a tainted injection passes
the taint on to the bound payload.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from dcc.lattice import IndexLattice
from dcc.normalize import normalize_taint, taint as add_taint
from dcc.syntax import (
    Abs,
    App,
    Bind,
    Case,
    Inj,
    Pair,
    Proj,
    StrongRet,
    Taint,
    Term,
    UnitV,
    Var,
    WeakRet,
    Weaken,
    is_value,
    show_term,
    subst,
)

DEFAULT_FUEL = 10**6


class EvalError(Exception):
    pass


class StuckTerm(EvalError):
    def __init__(self, term: Term, lat: IndexLattice | None = None):
        super().__init__(f"stuck at {show_term(term, lat)}")
        self.term = term


class FuelExhausted(EvalError):
    def __init__(self, fuel: int):
        super().__init__(f"no value after {fuel} steps")
        self.fuel = fuel


@dataclass(frozen=True)
class EvalConfig:
    taint: bool = False
    fuel: int = DEFAULT_FUEL


def step(e: Term, lat: IndexLattice, taint: bool = False) -> Optional[Term]:
    """One reduction step, or ``None`` when ``e`` is a weak-head value."""
    if isinstance(e, (UnitV, Abs, Pair, Inj, StrongRet, WeakRet)):
        return None
    if isinstance(e, Var):
        raise StuckTerm(e, lat)
    if isinstance(e, Taint):
        if not is_value(e.body):
            return Taint(_step_or_stuck(e.body, lat, taint), e.index)
        if isinstance(e.body, Taint):
            inner = step(e.body, lat, taint)
            if inner is not None:
                return Taint(inner, e.index)
            return add_taint(e.body, e.index, lat)
        out = add_taint(e.body, e.index, lat)
        return None if out == e else out
    if isinstance(e, App):
        if isinstance(e.fn, Abs):
            return subst(e.fn.body, e.fn.var, e.arg)
        return App(_step_or_stuck(e.fn, lat, taint), e.arg)
    if isinstance(e, Proj):
        if isinstance(e.body, Pair):
            return e.body.left if e.i == 1 else e.body.right
        return Proj(e.i, _step_or_stuck(e.body, lat, taint))
    if isinstance(e, Case):
        s = e.scrut
        if isinstance(s, Inj):
            return subst(e.left if s.i == 1 else e.right, e.var, s.body)
        if isinstance(s, Taint) and isinstance(s.body, Inj):
            inj = s.body
            payload = add_taint(inj.body, s.index, lat) if taint else inj.body
            return subst(e.left if inj.i == 1 else e.right, e.var, payload)
        return Case(_step_or_stuck(s, lat, taint), e.var, e.left, e.right)
    if isinstance(e, Bind):
        b = e.bound
        if isinstance(b, (StrongRet, WeakRet)):
            payload = add_taint(b.body, b.index, lat) if taint else b.body
            return subst(e.body, e.var, payload)
        return Bind(e.var, _step_or_stuck(b, lat, taint), e.body)
    if isinstance(e, Weaken):
        b = e.body
        if isinstance(b, StrongRet) and lat.is_level(b.index):
            return StrongRet(lat.beta(b.index), WeakRet(b.index, b.body))
        return Weaken(_step_or_stuck(b, lat, taint))
    raise TypeError(f"not a term: {e!r}")


def _step_or_stuck(e: Term, lat: IndexLattice, taint: bool) -> Term:
    out = step(e, lat, taint)
    if out is None:
        raise StuckTerm(e, lat)
    return out


def evaluate(e: Term, lat: IndexLattice, taint: bool = False, fuel: int = DEFAULT_FUEL) -> Term:
    """Reduce ``e`` to a weak-head value and taint-normalize the result."""
    for _ in range(fuel):
        nxt = step(e, lat, taint)
        if nxt is None:
            return normalize_taint(e, lat)
        e = nxt
    if step(e, lat, taint) is None:
        return normalize_taint(e, lat)
    raise FuelExhausted(fuel)


def trace_eval(e: Term, lat: IndexLattice, taint: bool = False, fuel: int = DEFAULT_FUEL) -> list[Term]:
    """Every intermediate term, starting with ``e`` itself."""
    out = [e]
    for _ in range(fuel):
        nxt = step(out[-1], lat, taint)
        if nxt is None:
            return out
        out.append(nxt)
    raise FuelExhausted(fuel)


def evaluate_data(e: Term, lat: IndexLattice, taint: bool = False, fuel: int = DEFAULT_FUEL) -> Term:
    """Like ``evaluate``, then keep going under pairs, injections and
    protections.  Function bodies are left alone."""
    v = evaluate(e, lat, taint, fuel)
    if isinstance(v, (StrongRet, WeakRet)):
        return normalize_taint(type(v)(v.index, evaluate_data(v.body, lat, taint, fuel)), lat)
    if isinstance(v, Pair):
        return Pair(evaluate_data(v.left, lat, taint, fuel), evaluate_data(v.right, lat, taint, fuel))
    if isinstance(v, Inj):
        return Inj(v.i, evaluate_data(v.body, lat, taint, fuel))
    if isinstance(v, Taint) and isinstance(v.body, Inj):
        inner = evaluate_data(v.body, lat, taint, fuel)
        return normalize_taint(Taint(inner, v.index), lat)
    return v

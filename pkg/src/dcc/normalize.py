"""Open-type equations and taint equations, read as left-to-right rewrites.

Canonical types keep qualifiers only directly on sums.  Inside ``W[l](.)``
and ``T[l](.)`` a qualifier ``q`` with ``q <= l`` that can be factored out
of the whole body is dropped, since ``W[l](s^q) = W[l](s^q)^q = W[l](s)``.
"""

from __future__ import annotations

from functools import lru_cache

from dcc.lattice import Index, IndexLattice
from dcc.syntax import (
    Abs,
    Fun,
    Inj,
    Meta,
    Open,
    Pair,
    Prod,
    Strong,
    StrongRet,
    Sum,
    Taint,
    Term,
    Type,
    UnitT,
    UnitV,
    Weak,
    WeakRet,
    map_children,
)


def normalize_type(t: Type, lat: IndexLattice) -> Type:
    return _Normalizer.get(lat).norm(t)


def push_qualifier(t: Type, q: Index, lat: IndexLattice) -> Type:
    """Normal form of ``t ^ q`` for an already normal ``t``."""
    return _Normalizer.get(lat).push(t, q)


class _Normalizer:
    _cache: dict[int, "_Normalizer"] = {}

    @classmethod
    def get(cls, lat: IndexLattice) -> "_Normalizer":
        n = cls._cache.get(id(lat))
        if n is None or n.lat is not lat:
            n = cls._cache[id(lat)] = cls(lat)
        return n

    def __init__(self, lat: IndexLattice):
        self.lat = lat
        # factoring candidates, largest first
        below = {i: sum(lat.leq(j, i) for j in lat.indices()) for i in lat.indices()}
        self.order = sorted(lat.indices(), key=lambda i: (-below[i], i))
        self.norm = lru_cache(maxsize=None)(self._norm)
        self.push = lru_cache(maxsize=None)(self._push)

    def _norm(self, t: Type) -> Type:
        if isinstance(t, (UnitT, Meta)):
            return t
        if isinstance(t, Prod):
            return Prod(self.norm(t.left), self.norm(t.right))
        if isinstance(t, Sum):
            return Sum(self.norm(t.left), self.norm(t.right))
        if isinstance(t, Fun):
            return Fun(self.norm(t.dom), self.norm(t.cod))
        if isinstance(t, Strong):
            return Strong(t.index, self.inside(t.index, self.norm(t.body)))
        if isinstance(t, Weak):
            return Weak(t.index, self.inside(t.index, self.norm(t.body)))
        if isinstance(t, Open):
            return self.push(self.norm(t.body), t.index)
        raise TypeError(f"not a type: {t!r}")

    def _push(self, t: Type, q: Index) -> Type:
        lat = self.lat
        if q == lat.bottom or isinstance(t, UnitT):
            return t
        if isinstance(t, Prod):
            return Prod(self.push(t.left, q), self.push(t.right, q))
        if isinstance(t, Fun):
            return Fun(t.dom, self.push(t.cod, q))
        if isinstance(t, (Sum, Meta)):
            return Open(t, q)
        if isinstance(t, Open):
            return Open(t.body, lat.join(t.index, q))
        if isinstance(t, (Weak, Strong)):
            if lat.leq(q, t.index):
                return t
            return type(t)(t.index, self.inside(t.index, self.push(t.body, q)))
        raise TypeError(f"not a type: {t!r}")

    def inside(self, bound: Index, s: Type) -> Type:
        lat = self.lat
        changed = True
        while changed:
            changed = False
            for q in self.order:
                if q == lat.bottom or not lat.leq(q, bound):
                    continue
                u = self.factor(s, q)
                if u is not None and u != s:
                    s = u
                    changed = True
                    break
        return s

    def factor(self, t: Type, q: Index) -> Type | None:
        """Some ``u`` with ``push(u, q) == t``, qualifiers kept minimal."""
        lat = self.lat
        if isinstance(t, UnitT):
            return t
        if isinstance(t, Prod):
            left = self.factor(t.left, q)
            right = self.factor(t.right, q)
            if left is None or right is None:
                return None
            return Prod(left, right)
        if isinstance(t, Fun):
            cod = self.factor(t.cod, q)
            return None if cod is None else Fun(t.dom, cod)
        if isinstance(t, Open):
            if not lat.leq(q, t.index):
                return None
            roots = [r for r in lat.indices() if lat.join(r, q) == t.index]
            least = [r for r in roots if not any(o != r and lat.leq(o, r) for o in roots)]
            r0 = min(least)
            return t.body if r0 == lat.bottom else Open(t.body, r0)
        if isinstance(t, (Weak, Strong)):
            if lat.leq(q, t.index):
                return t
            body = self.factor(t.body, q)
            return None if body is None else type(t)(t.index, body)
        return None


def discharge_covered(t: Type, lat: IndexLattice) -> Type:
    """Drop qualifiers already met by the protections around them.

    A qualifier ``q`` at a positive position under ``W``/``T`` protections
    whose indices join to ``b`` is dropped when ``q <= b``.  The equations
    above only drop a qualifier that factors out of a whole protected body,
    so ``W[H]((unit+unit)^H + unit)`` is canonical; this relates it to
    ``W[H]((unit+unit) + unit)``.
    """

    def go(t: Type, bound: Index) -> Type:
        if isinstance(t, Open):
            body = go(t.body, bound)
            return body if lat.leq(t.index, bound) else Open(body, t.index)
        if isinstance(t, (Weak, Strong)):
            return type(t)(t.index, go(t.body, lat.join(bound, t.index)))
        if isinstance(t, Fun):
            return Fun(t.dom, go(t.cod, bound))
        if isinstance(t, Prod):
            return Prod(go(t.left, bound), go(t.right, bound))
        if isinstance(t, Sum):
            return Sum(go(t.left, bound), go(t.right, bound))
        return t

    return normalize_type(go(normalize_type(t, lat), lat.bottom), lat)


# ---------------------------------------------------------------- terms


def taint(e: Term, q: Index, lat: IndexLattice) -> Term:
    """Normal form of ``e @ q`` for an already normal ``e``."""
    if q == lat.bottom or isinstance(e, UnitV):
        return e
    if isinstance(e, Taint):
        return Taint(e.body, lat.join(e.index, q))
    if isinstance(e, Abs):
        return Abs(e.var, e.ann, taint(e.body, q, lat))
    if isinstance(e, Pair):
        return Pair(taint(e.left, q, lat), taint(e.right, q, lat))
    if isinstance(e, (WeakRet, StrongRet)):
        if lat.leq(q, e.index):
            return e
        return type(e)(e.index, taint(e.body, q, lat))
    return Taint(e, q)


def normalize_taint(e: Term, lat: IndexLattice) -> Term:
    if isinstance(e, Taint):
        return taint(normalize_taint(e.body, lat), e.index, lat)
    return map_children(e, lambda c: normalize_taint(c, lat))


def normalize_annotations(e: Term, lat: IndexLattice) -> Term:
    if isinstance(e, Abs):
        return Abs(e.var, normalize_type(e.ann, lat), normalize_annotations(e.body, lat))
    return map_children(e, lambda c: normalize_annotations(c, lat))


def is_canonical_type(t: Type, lat: IndexLattice, under_open: bool = False) -> bool:
    if isinstance(t, Open):
        return (
            not under_open
            and t.index != lat.bottom
            and isinstance(t.body, (Sum, Meta))
            and is_canonical_type(t.body, lat, True)
        )
    from dcc.syntax import type_children

    return all(is_canonical_type(c, lat) for c in type_children(t))


def is_canonical_taint(e: Term, lat: IndexLattice) -> bool:
    """Taints on values wrap only injections and are never bottom."""
    from dcc.syntax import children, is_value

    if isinstance(e, Taint):
        if e.index == lat.bottom or isinstance(e.body, Taint):
            return False
        if is_value(e.body) and not isinstance(e.body, Inj):
            return False
    return all(is_canonical_taint(c, lat) for c in children(e))

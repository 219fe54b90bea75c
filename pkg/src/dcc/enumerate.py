"""Exhaustive enumeration of types and of well-typed terms by size.

Terms are built bottom-up from well-typed pieces, memoized by typing
context, context registers and size; every composite is admitted only if
the checker accepts it in that context, so the checker stays the single
authority on typability.  ``raw_terms`` is the plain generate-and-filter
counterpart used to validate this enumerator at small sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from dcc.lattice import Index, IndexLattice
from dcc.normalize import normalize_type, push_qualifier
from dcc.syntax import (
    UNIT,
    UNITV,
    Abs,
    App,
    Bind,
    Case,
    Fun,
    Inj,
    Meta,
    Open,
    Pair,
    Prod,
    Proj,
    Strong,
    StrongRet,
    Sum,
    Term,
    Type,
    UnitT,
    Var,
    Weak,
    WeakRet,
    Weaken,
    type_children,
)
from dcc.typecheck import CheckReport, System, TypingEnv, check


class BoundsTooLarge(Exception):
    """The requested bounds exceed the configured work budget.

    ``report`` carries whatever was verified before giving up.
    """

    def __init__(self, message: str, report: object = None):
        super().__init__(message)
        self.report = report


GRAMMARS = ("dcc", "dccd", "hybrid")


# ------------------------------------------------------------ types


def enum_types(
    height: int,
    lat: IndexLattice,
    grammar: str = "dcc",
    indices: Optional[Iterable[Index]] = None,
) -> list[Type]:
    """All normalized types of height at most ``height`` in ``grammar``."""
    if grammar not in GRAMMARS:
        raise ValueError(f"unknown grammar {grammar!r}")
    idx = list(indices) if indices is not None else lat.levels()
    strong = grammar in ("dcc", "hybrid")
    weak = grammar in ("dccd", "hybrid")
    quals = [q for q in idx if q != lat.bottom] if weak else []
    layers: list[list[Type]] = [[UNIT]]
    seen = {UNIT}
    for _ in range(1, height):
        below = [t for layer in layers for t in layer]
        new: list[Type] = []

        def add(t: Type) -> None:
            t = normalize_type(t, lat)
            if t not in seen:
                seen.add(t)
                new.append(t)

        for a in below:
            for b in below:
                add(Prod(a, b))
                add(Sum(a, b))
                for q in quals:
                    add(Open(Sum(a, b), q))
                add(Fun(a, b))
            for i in idx:
                if strong:
                    add(Strong(i, a))
                if weak:
                    add(Weak(i, a))
        layers.append(new)
    return [t for layer in layers for t in layer]


def leak_types(max_size: int, lat: IndexLattice, indices: Optional[Iterable[Index]] = None) -> list[Type]:
    """Normalized types of the leak grammar with at most ``max_size`` nodes.

    The grammar is unit, products, (qualified) sums, arrows and ``W[l](.)``.
    """
    idx = list(indices) if indices is not None else lat.levels()
    quals = [q for q in idx if q != lat.bottom]
    by_size: dict[int, list[Type]] = {1: [UNIT]}
    for n in range(2, max_size + 1):
        out: list[Type] = []
        for a in by_size[n - 1]:
            out.extend(Weak(i, a) for i in idx)
        for k in range(1, n - 1):
            for a in by_size[k]:
                for b in by_size[n - 1 - k]:
                    out.append(Prod(a, b))
                    out.append(Sum(a, b))
                    out.extend(Open(Sum(a, b), q) for q in quals)
                    out.append(Fun(a, b))
        by_size[n] = out
    seen: set[Type] = set()
    result = []
    for n in sorted(by_size):
        for t in by_size[n]:
            t = normalize_type(t, lat)
            if t not in seen:
                seen.add(t)
                result.append(t)
    return result


def first_order_types(
    max_size: int, lat: IndexLattice, grammar: str = "dcc", indices: Optional[Iterable[Index]] = None
) -> list[Type]:
    """Arrow-free normalized types with at most ``max_size`` nodes."""
    if grammar not in GRAMMARS:
        raise ValueError(f"unknown grammar {grammar!r}")
    idx = list(indices) if indices is not None else lat.levels()
    wraps = ([Strong] if grammar in ("dcc", "hybrid") else []) + ([Weak] if grammar in ("dccd", "hybrid") else [])
    by_size: dict[int, list[Type]] = {1: [UNIT]}
    for n in range(2, max_size + 1):
        out: list[Type] = [w(i, a) for a in by_size[n - 1] for w in wraps for i in idx]
        for k in range(1, n - 1):
            for a in by_size[k]:
                for b in by_size[n - 1 - k]:
                    out.append(Prod(a, b))
                    out.append(Sum(a, b))
        by_size[n] = out
    seen: set[Type] = set()
    result = []
    for n in sorted(by_size):
        for t in by_size[n]:
            t = normalize_type(t, lat)
            if t not in seen:
                seen.add(t)
                result.append(t)
    return result


# ------------------------------------------------------------ terms


@dataclass(frozen=True)
class EnumConfig:
    """What the term enumerator may put into terms."""

    system: System
    annotations: tuple[Type, ...]
    indices: tuple[Index, ...]
    max_candidates: int = 5_000_000
    # DCC^dc only: whether ``weaken`` may occur
    weaken: bool = True


def default_config(system: System | str, lat: IndexLattice) -> EnumConfig:
    """Annotation pool: unit, a boolean, and the boolean under each protection."""
    system = System(system)
    boolean = Sum(UNIT, UNIT)
    anns: list[Type] = [UNIT, boolean]
    levels = [i for i in lat.levels() if i != lat.bottom] or lat.levels()
    for i in levels:
        if system in (System.DCC, System.DCCDC, System.DCCCD):
            anns.append(Strong(i, boolean))
        if system in (System.DCCD, System.DCCDC):
            anns.append(Weak(i, boolean))
    return EnumConfig(system, tuple(normalize_type(a, lat) for a in anns), tuple(lat.levels()))


Entry = tuple[Term, Type]


@dataclass
class _Stats:
    candidates: int = 0
    checks: int = 0
    memo_entries: int = 0


class TermEnumerator:
    """Well-typed terms of each size, per context and register setting."""

    def __init__(self, lat: IndexLattice, cfg: EnumConfig):
        self.lat = lat
        self.cfg = cfg
        self.sys = cfg.system
        self.memo: dict[tuple, list[Entry]] = {}
        self.stats = _Stats()

    # registers the active system consults
    def regs(self, pi: Index, pibar: Index, sigma: Index) -> tuple[Index, Index, Index]:
        lat, s = self.lat, self.sys
        return (
            pi if s in (System.DCC, System.DCCDC, System.DCCCD) else lat.bottom,
            pibar if s in (System.DCCD, System.DCCDC) else lat.bottom,
            sigma if s is System.DCCCD else lat.top,
        )

    def closed(self, size: int) -> Iterator[Entry]:
        """Closed well-typed terms of size at most ``size`` with their types."""
        lat = self.lat
        regs = self.regs(lat.bottom, lat.bottom, lat.top)
        for n in range(1, size + 1):
            for e, _ in self.terms((), regs, n):
                r = check(self.env((), regs), e)
                if r.ok:
                    assert r.type is not None
                    yield e, r.type

    def env(self, gamma: tuple[Type, ...], regs: tuple[Index, Index, Index]) -> TypingEnv:
        return TypingEnv(
            self.lat,
            self.sys,
            tuple((f"x{i}", t) for i, t in enumerate(gamma)),
            regs[0],
            regs[1],
            regs[2],
        )

    def terms(self, gamma: tuple[Type, ...], regs: tuple[Index, Index, Index], n: int) -> list[Entry]:
        gamma = _canonical_gamma(gamma)
        key = (gamma, regs, n)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = list(self._build(gamma, regs, n))
            self.stats.memo_entries += 1
        return hit

    def closed_with(self, annotations: Iterable[Type], n: int) -> Iterator[Entry]:
        """Closed terms of exactly size ``n`` whose outermost abstraction, if
        any, is annotated with one of ``annotations``.  Not memoized."""
        lat = self.lat
        regs = self.regs(lat.bottom, lat.bottom, lat.top)
        return self._build((), regs, n, tuple(annotations))

    def admit(self, gamma: tuple[Type, ...], regs: tuple[Index, Index, Index], e: Term) -> Optional[Entry]:
        self.stats.checks += 1
        if self.stats.checks > self.cfg.max_candidates:
            raise BoundsTooLarge(f"more than {self.cfg.max_candidates} candidate terms")
        r: CheckReport = check(self.env(gamma, regs), e, default=False)
        if not r.ok:
            return None
        assert r.type is not None
        return e, r.type

    def _build(
        self, gamma: tuple[Type, ...], regs: tuple[Index, Index, Index], n: int, anns: Optional[tuple[Type, ...]] = None
    ) -> Iterator[Entry]:
        lat, sys = self.lat, self.sys
        pi, pibar, sigma = regs
        x = f"x{len(gamma)}"
        if n == 1:
            yield UNITV, UNIT
            for i, t in enumerate(gamma):
                yield Var(f"x{i}"), t
            return
        seen: set[Term] = set()

        def emit(e: Term) -> Iterator[Entry]:
            if e in seen:
                return
            seen.add(e)
            got = self.admit(gamma, regs, e)
            if got is not None:
                yield got

        sub = self.terms
        # abstraction: the body alone decides typability
        for ann in self.cfg.annotations if anns is None else anns:
            for b, tb in sub(gamma + (ann,), regs, n - 1):
                yield Abs(x, ann, b), Fun(ann, tb)
        for e, t in sub(gamma, regs, n - 1):
            for i in (1, 2):
                yield from emit(Inj(i, e))
            if isinstance(t, Prod):
                for i in (1, 2):
                    yield from emit(Proj(i, e))
            if self.cfg.weaken and sys is System.DCCDC and isinstance(t, Strong) and lat.is_level(t.index):
                yield from emit(Weaken(e))
        for i in self.cfg.indices:
            if sys is not System.DCCD:
                inner = self.regs(lat.join(pi, i), lat.join(pibar, i) if sys is System.DCCDC else pibar, sigma)
                for e, _ in sub(gamma, inner, n - 1):
                    yield from emit(StrongRet(i, e))
            if sys in (System.DCCD, System.DCCDC):
                inner = self.regs(pi, lat.join(pibar, i), sigma)
                for e, _ in sub(gamma, inner, n - 1):
                    yield from emit(WeakRet(i, e))
        for n1 in range(1, n - 1):
            n2 = n - 1 - n1
            lefts = sub(gamma, regs, n1)
            rights = sub(gamma, regs, n2)
            for a, ta in lefts:
                for b, _ in rights:
                    yield from emit(Pair(a, b))
            for f, tf in lefts:
                if isinstance(tf, Fun):
                    for a, ta in rights:
                        if _compatible(tf.dom, ta) or (isinstance(f, Abs) and _compatible(_erase(tf.dom), _erase(ta))):
                            yield from emit(App(f, a))
            # bind
            for b, tb in lefts:
                for var_t, body_regs in self.bind_contexts(tb, regs):
                    for body, _ in sub(gamma + (var_t,), body_regs, n2):
                        yield from emit(Bind(x, b, body))
        # case: scrutinee, then two branches
        for n1 in range(1, n - 2):
            for s, ts in sub(gamma, regs, n1):
                split = _sum_parts(ts)
                if split is None:
                    continue
                left_t, right_t, q = split
                if sys is System.DCC and q is not None:
                    continue
                tl = _push(left_t, q, lat)
                tr = _push(right_t, q, lat)
                for n2 in range(1, n - 1 - n1):
                    n3 = n - 1 - n1 - n2
                    rights = sub(gamma + (tr,), regs, n3)
                    for e1, t1 in sub(gamma + (tl,), regs, n2):
                        for e2, t2 in rights:
                            if _compatible(t1, t2):
                                yield from emit(Case(s, x, e1, e2))

    def bind_contexts(self, t: Type, regs: tuple[Index, Index, Index]) -> list[tuple[Type, tuple[Index, Index, Index]]]:
        lat, sys = self.lat, self.sys
        pi, pibar, sigma = regs
        if isinstance(t, Strong):
            if sys in (System.DCC, System.DCCDC):
                return [(t.body, regs)]
            if sys is System.DCCCD:
                return [
                    (t.body, regs),
                    (_push(t.body, t.index, lat), self.regs(pi, pibar, lat.meet(sigma, t.index))),
                ]
        if isinstance(t, Weak) and sys in (System.DCCD, System.DCCDC):
            return [(_push(t.body, t.index, lat), regs)]
        return []


def _sum_parts(t: Type) -> Optional[tuple[Type, Type, Optional[Index]]]:
    if isinstance(t, Sum):
        return t.left, t.right, None
    if isinstance(t, Open) and isinstance(t.body, Sum):
        return t.body.left, t.body.right, t.index
    return None


def _push(t: Type, q: Optional[Index], lat: IndexLattice) -> Type:
    """The checker's qualifier push: metas a qualifier would reach become unit."""
    if q is None or q == lat.bottom:
        return t
    return push_qualifier(_default_reachable(t), q, lat)


def _default_reachable(t: Type) -> Type:
    if isinstance(t, Meta):
        return UNIT
    if isinstance(t, Prod):
        return Prod(_default_reachable(t.left), _default_reachable(t.right))
    if isinstance(t, Fun):
        return Fun(t.dom, _default_reachable(t.cod))
    if isinstance(t, (Strong, Weak)):
        return type(t)(t.index, _default_reachable(t.body))
    if isinstance(t, Open):
        return Open(_default_reachable(t.body), t.index)
    return t


def _erase(t: Type) -> Type:
    if isinstance(t, Open):
        return _erase(t.body)
    if isinstance(t, (UnitT, Meta)):
        return t
    if isinstance(t, Prod):
        return Prod(_erase(t.left), _erase(t.right))
    if isinstance(t, Sum):
        return Sum(_erase(t.left), _erase(t.right))
    if isinstance(t, Fun):
        return Fun(_erase(t.dom), _erase(t.cod))
    return type(t)(t.index, _erase(t.body))  # type: ignore[attr-defined]


def _compatible(a: Type, b: Type) -> bool:
    """Could ``a`` and ``b`` unify?  Metas match anything."""
    if isinstance(a, Meta) or isinstance(b, Meta):
        return True
    if type(a) is not type(b):
        return False
    if isinstance(a, (Strong, Weak, Open)) and a.index != b.index:  # type: ignore[union-attr]
        return False
    return all(_compatible(x, y) for x, y in zip(type_children(a), type_children(b)))


def _canonical_gamma(gamma: tuple[Type, ...]) -> tuple[Type, ...]:
    """Renumber metas in order of first appearance."""
    mapping: dict[int, int] = {}

    def walk(t: Type) -> Type:
        if isinstance(t, Meta):
            if t.id not in mapping:
                mapping[t.id] = len(mapping)
            return Meta(mapping[t.id])
        if isinstance(t, UnitT):
            return t
        if isinstance(t, Prod):
            return Prod(walk(t.left), walk(t.right))
        if isinstance(t, Sum):
            return Sum(walk(t.left), walk(t.right))
        if isinstance(t, Fun):
            return Fun(walk(t.dom), walk(t.cod))
        if isinstance(t, Open):
            return Open(walk(t.body), t.index)
        return type(t)(t.index, walk(t.body))  # type: ignore[attr-defined]

    return tuple(walk(t) for t in gamma)


# ------------------------------------------------------------ front ends


_ENUMERATORS: dict[tuple[int, EnumConfig], TermEnumerator] = {}


def enumerator(lat: IndexLattice, cfg: EnumConfig) -> TermEnumerator:
    key = (id(lat), cfg)
    en = _ENUMERATORS.get(key)
    if en is None or en.lat is not lat:
        en = _ENUMERATORS[key] = TermEnumerator(lat, cfg)
    return en


def enum_closed_terms(
    system: System | str, size: int, lat: IndexLattice, cfg: Optional[EnumConfig] = None
) -> list[Entry]:
    """Every closed term of size at most ``size`` that typechecks, with its type."""
    cfg = cfg or default_config(system, lat)
    return list(enumerator(lat, cfg).closed(size))


def enum_typed_terms(
    t: Type, system: System | str, size: int, lat: IndexLattice, cfg: Optional[EnumConfig] = None
) -> list[Term]:
    """Closed terms of size at most ``size`` that check at exactly ``t``."""
    cfg = cfg or default_config(system, lat)
    en = enumerator(lat, cfg)
    lat_bottom, lat_top = lat.bottom, lat.top
    regs = en.regs(lat_bottom, lat_bottom, lat_top)
    out = []
    for n in range(1, size + 1):
        for e, _ in en.terms((), regs, n):
            if check(en.env((), regs), e, expected=t).ok:
                out.append(e)
    return out


# ------------------------------------------------------------ generate and filter


def raw_terms(size: int, lat: IndexLattice, cfg: EnumConfig, depth: int = 0) -> list[Term]:
    """Every term of exactly ``size`` nodes over the configured pools.

    Binders at nesting depth ``k`` are named ``x<k>`` so that the output is
    duplicate-free up to renaming; no typing is involved.
    """
    return list(_raw(size, depth, cfg, lat))


def _raw(n: int, depth: int, cfg: EnumConfig, lat: IndexLattice) -> Iterator[Term]:
    sys = cfg.system
    x = f"x{depth}"
    if n == 1:
        yield UNITV
        for i in range(depth):
            yield Var(f"x{i}")
        return
    for ann in cfg.annotations:
        for b in _raw(n - 1, depth + 1, cfg, lat):
            yield Abs(x, ann, b)
    for e in _raw(n - 1, depth, cfg, lat):
        yield Inj(1, e)
        yield Inj(2, e)
        yield Proj(1, e)
        yield Proj(2, e)
        if sys is System.DCCDC and cfg.weaken:
            yield Weaken(e)
        for i in cfg.indices:
            if sys is not System.DCCD:
                yield StrongRet(i, e)
            if sys in (System.DCCD, System.DCCDC):
                yield WeakRet(i, e)
    for n1 in range(1, n - 1):
        n2 = n - 1 - n1
        for a in _raw(n1, depth, cfg, lat):
            for b in _raw(n2, depth, cfg, lat):
                yield Pair(a, b)
                yield App(a, b)
            for b in _raw(n2, depth + 1, cfg, lat):
                yield Bind(x, a, b)
    for n1 in range(1, n - 2):
        for s in _raw(n1, depth, cfg, lat):
            for n2 in range(1, n - 1 - n1):
                n3 = n - 1 - n1 - n2
                for e1 in _raw(n2, depth + 1, cfg, lat):
                    for e2 in _raw(n3, depth + 1, cfg, lat):
                        yield Case(s, x, e1, e2)


def generate_and_filter(size: int, lat: IndexLattice, cfg: EnumConfig) -> list[Entry]:
    """Closed well-typed terms of size at most ``size``, by brute force."""
    out = []
    env = TypingEnv(lat, cfg.system)
    for n in range(1, size + 1):
        for e in _raw(n, 0, cfg, lat):
            r = check(env, e)
            if r.ok:
                assert r.type is not None
                out.append((e, r.type))
    return out


__all__ = [
    "BoundsTooLarge",
    "EnumConfig",
    "TermEnumerator",
    "default_config",
    "enum_closed_terms",
    "enum_typed_terms",
    "enum_types",
    "enumerator",
    "first_order_types",
    "generate_and_filter",
    "leak_types",
    "raw_terms",
]

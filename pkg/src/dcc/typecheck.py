"""Syntax-directed typecheckers for DCC, DCC^d, DCC^dc and DCC^cd.

One traversal serves all four systems; the active system decides which
context registers are consulted and which rule variants apply.  The only
non-syntax-directed piece of information is the missing summand of an
injection, which is a unification variable resolved by the surrounding
term and otherwise defaulted to ``unit``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional

from dcc.lattice import Index, IndexLattice, UnknownElement
from dcc.normalize import normalize_type, push_qualifier
from dcc.protect import protected_at, weakly_protected_at
from dcc.syntax import (
    UNIT,
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
    Span,
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
    show_index,
    show_term,
    show_type,
)


class System(enum.Enum):
    DCC = "dcc"
    DCCD = "dccd"
    DCCDC = "dccdc"
    DCCCD = "dcccd"


_PREFIX = {System.DCC: "T", System.DCCD: "T^D", System.DCCDC: "T^DC", System.DCCCD: "T^CD"}


def rule_name(system: System, rule: str) -> str:
    return f"{_PREFIX[system]}-{rule}"


class CheckError(Exception):
    def __init__(self, rule: str, message: str, span: Optional[Span] = None):
        super().__init__(f"{rule}: {message}")
        self.rule = rule
        self.message = message
        self.span = span


class TypeMismatch(CheckError):
    pass


class UnboundVariable(CheckError):
    pass


class SideConditionFailed(CheckError):
    def __init__(self, rule: str, condition: str, span: Optional[Span] = None, message: str | None = None):
        super().__init__(rule, message or f"side condition {condition} failed", span)
        self.condition = condition


class ConstructNotInSystem(CheckError):
    pass


@dataclass(frozen=True)
class TypingEnv:
    lat: IndexLattice
    system: System
    gamma: tuple[tuple[str, Type], ...] = ()
    pi: Optional[Index] = None
    pibar: Optional[Index] = None
    sigma: Optional[Index] = None
    allow_taint: bool = False

    def __post_init__(self) -> None:
        # closed-term defaults
        if self.pi is None:
            object.__setattr__(self, "pi", self.lat.bottom)
        if self.pibar is None:
            object.__setattr__(self, "pibar", self.lat.bottom)
        if self.sigma is None:
            object.__setattr__(self, "sigma", self.lat.top)

    def extend(self, x: str, t: Type) -> TypingEnv:
        return replace(self, gamma=self.gamma + ((x, t),))

    def lookup(self, x: str) -> Optional[Type]:
        for name, t in reversed(self.gamma):
            if name == x:
                return t
        return None


@dataclass(frozen=True)
class TraceStep:
    depth: int
    rule: str
    judgment: str


@dataclass
class CheckReport:
    type: Optional[Type]
    error: Optional[CheckError] = None
    trace: list[TraceStep] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.error is None

    def rules(self) -> list[str]:
        return [s.rule for s in self.trace]

    def describe(self, lat: IndexLattice | None = None) -> str:
        if self.ok:
            assert self.type is not None
            return show_type(self.type, lat)
        assert self.error is not None
        return str(self.error)


def check(
    env: TypingEnv,
    e: Term,
    expected: Type | None = None,
    trace: bool = False,
    default: bool = True,
) -> CheckReport:
    """Typecheck ``e``; with ``expected``, the result must be that type.

    With ``default=False`` undetermined injection summands stay as
    ``Meta`` nodes in the reported type (used by the term enumerator).
    """
    c = _Checker(env.lat, env.system, trace)
    c.next_meta = 1 + max((m for _, t in env.gamma for m in _meta_ids(t)), default=-1)
    try:
        t = c.infer(env, e, 0)
        if expected is not None:
            want = c.wf_type(env.system, expected, e)
            if not c.unify(want, t):
                raise TypeMismatch(
                    c.rule("result"),
                    f"expected {show_type(want, env.lat)}, found {show_type(c.resolve(t), env.lat)}",
                    getattr(e, "span", None),
                )
        t = c.default(t) if default else c.resolve(t)
    except CheckError as err:
        steps = c.finish_trace()
        if trace:
            steps.append(TraceStep(0, err.rule, f"failed: {err.message}"))
        return CheckReport(None, err, steps, c.notes)
    return CheckReport(t, None, c.finish_trace(), c.notes)


def _meta_ids(t: Type) -> list[int]:
    if isinstance(t, Meta):
        return [t.id]
    from dcc.syntax import type_children

    return [m for c in type_children(t) for m in _meta_ids(c)]


def type_of(env: TypingEnv, e: Term) -> Optional[Type]:
    return check(env, e).type


class _Checker:
    def __init__(self, lat: IndexLattice, system: System, trace: bool):
        self.lat = lat
        self.system = system
        self.subst: dict[int, Type] = {}
        self.next_meta = 0
        self.tracing = trace
        self.steps: list[tuple[int, str, Term, Type]] = []
        self.notes: list[str] = []

    def rule(self, name: str) -> str:
        return rule_name(self.system, name)

    # ------------------------------------------------------------ metas
    def fresh_meta(self) -> Meta:
        m = Meta(self.next_meta)
        self.next_meta += 1
        return m

    def resolve(self, t: Type) -> Type:
        return normalize_type(self._zonk(t), self.lat)

    def _zonk(self, t: Type) -> Type:
        if isinstance(t, Meta):
            bound = self.subst.get(t.id)
            return t if bound is None else self._zonk(bound)
        if isinstance(t, UnitT):
            return t
        if isinstance(t, Prod):
            return Prod(self._zonk(t.left), self._zonk(t.right))
        if isinstance(t, Sum):
            return Sum(self._zonk(t.left), self._zonk(t.right))
        if isinstance(t, Fun):
            return Fun(self._zonk(t.dom), self._zonk(t.cod))
        if isinstance(t, (Strong, Weak)):
            return type(t)(t.index, self._zonk(t.body))
        if isinstance(t, Open):
            return Open(self._zonk(t.body), t.index)
        raise TypeError(t)

    def metas(self, t: Type, reachable_only: bool = False) -> list[int]:
        """Unresolved metas in ``t``; optionally only those a qualifier reaches."""
        out: list[int] = []

        def walk(u: Type) -> None:
            if isinstance(u, Meta):
                out.append(u.id)
            elif isinstance(u, (Prod,)):
                walk(u.left)
                walk(u.right)
            elif isinstance(u, Sum):
                if not reachable_only:
                    walk(u.left)
                    walk(u.right)
            elif isinstance(u, Fun):
                if not reachable_only:
                    walk(u.dom)
                walk(u.cod)
            elif isinstance(u, (Strong, Weak, Open)):
                walk(u.body)

        walk(self.resolve(t))
        return out

    def default(self, t: Type) -> Type:
        for m in self.metas(t):
            self.subst[m] = UNIT
        return self.resolve(t)

    def push(self, t: Type, q: Index) -> Type:
        for m in self.metas(t, reachable_only=True):
            self.subst[m] = UNIT
        return push_qualifier(self.resolve(t), q, self.lat)

    def unify(self, a: Type, b: Type) -> bool:
        saved = dict(self.subst)
        if self._unify(self.resolve(a), self.resolve(b)):
            return True
        self.subst = saved
        return False

    def _unify(self, a: Type, b: Type) -> bool:
        if a == b:
            return True
        if isinstance(a, Meta) or isinstance(b, Meta):
            m, other = (a, b) if isinstance(a, Meta) else (b, a)
            assert isinstance(m, Meta)
            if m.id in self.metas(other):
                return False
            self.subst[m.id] = other
            return True
        if type(a) is not type(b):
            return False
        if isinstance(a, (Strong, Weak, Open)) and a.index != b.index:  # type: ignore[union-attr]
            return False
        from dcc.syntax import type_children

        for x, y in zip(type_children(a), type_children(b)):
            if not self._unify(self.resolve(x), self.resolve(y)):
                return False
        return True

    # ------------------------------------------------------------ helpers
    def record(self, depth: int, rule: str, e: Term, t: Type) -> Type:
        if self.tracing:
            self.steps.append((depth, rule, e, t))
        return t

    def finish_trace(self) -> list[TraceStep]:
        # steps arrive in post-order; a step adopts the finished steps one level below it
        roots: list[tuple[tuple[int, str, Term, Type], list]] = []
        for step in self.steps:
            depth = step[0]
            kids = []
            while roots and roots[-1][0][0] > depth:
                kids.append(roots.pop())
            roots.append((step, kids[::-1]))
        out: list[TraceStep] = []

        def emit(node: tuple[tuple[int, str, Term, Type], list]) -> None:
            (depth, rule, e, t), kids = node
            judgment = f"{show_term(e, self.lat)} : {show_type(self.resolve(t), self.lat)}"
            out.append(TraceStep(depth, rule, judgment))
            for k in kids:
                emit(k)

        for r in roots:
            emit(r)
        return out

    def show(self, t: Type) -> str:
        return show_type(self.resolve(t), self.lat)

    def idx(self, i: Index) -> str:
        return show_index(i, self.lat)

    def wf_type(self, system: System, t: Type, where: Term) -> Type:
        span = getattr(where, "span", None)

        def walk(u: Type) -> None:
            if isinstance(u, Weak) and system in (System.DCC,):
                raise ConstructNotInSystem(self.rule("type"), "W[.] types are not part of DCC", span)
            if isinstance(u, Strong) and system is System.DCCD:
                raise ConstructNotInSystem(self.rule("type"), "T[.] types are not part of DCC^d", span)
            if isinstance(u, Open) and system is System.DCC:
                raise ConstructNotInSystem(self.rule("type"), "open types are not part of DCC", span)
            if isinstance(u, (Strong, Weak, Open)):
                try:
                    self.lat.leq(u.index, u.index)
                except UnknownElement as err:
                    raise ConstructNotInSystem(self.rule("type"), f"unknown level {err}", span) from None
            from dcc.syntax import type_children

            for c in type_children(u):
                walk(c)

        walk(t)
        return normalize_type(t, self.lat)

    def not_in_system(self, e: Term, what: str) -> ConstructNotInSystem:
        return ConstructNotInSystem(self.rule("syntax"), f"{what} is not part of {self.system.value}", e.span)  # type: ignore[attr-defined]

    # ------------------------------------------------------------ rules
    def infer(self, env: TypingEnv, e: Term, depth: int) -> Type:
        sys = self.system
        lat = self.lat
        if isinstance(e, Var):
            t = env.lookup(e.name)
            if t is None:
                raise UnboundVariable(self.rule("var"), f"unbound variable {e.name}", e.span)
            return self.record(depth, self.rule("var"), e, t)
        if isinstance(e, UnitV):
            return self.record(depth, self.rule("unit"), e, UNIT)
        if isinstance(e, Abs):
            ann = self.wf_type(sys, e.ann, e)
            body = self.infer(env.extend(e.var, ann), e.body, depth + 1)
            return self.record(depth, self.rule("abs"), e, Fun(ann, body))
        if isinstance(e, App):
            return self.infer_app(env, e, depth)
        if isinstance(e, Pair):
            left = self.infer(env, e.left, depth + 1)
            right = self.infer(env, e.right, depth + 1)
            return self.record(depth, self.rule("pair"), e, Prod(left, right))
        if isinstance(e, Proj):
            t = self.resolve(self.infer(env, e.body, depth + 1))
            if not isinstance(t, Prod):
                t = self.default(t)
                raise TypeMismatch(self.rule("proj"), f"expected a product, found {self.show(t)}", e.span)
            return self.record(depth, self.rule("proj"), e, t.left if e.i == 1 else t.right)
        if isinstance(e, Inj):
            t = self.infer(env, e.body, depth + 1)
            other = self.fresh_meta()
            return self.record(depth, self.rule("inj"), e, Sum(t, other) if e.i == 1 else Sum(other, t))
        if isinstance(e, Case):
            return self.infer_case(env, e, depth)
        if isinstance(e, StrongRet):
            if sys is System.DCCD:
                raise self.not_in_system(e, "eta")
            inner = replace(env, pi=lat.join(env.pi, e.index))
            name = "ret"
            if sys is System.DCCDC:
                inner = replace(inner, pibar=lat.join(env.pibar, e.index))
                name = "ret-1"
            body = self.infer(inner, e.body, depth + 1)
            return self.record(depth, self.rule(name), e, Strong(e.index, body))
        if isinstance(e, WeakRet):
            if sys in (System.DCC, System.DCCCD):
                raise self.not_in_system(e, "weta")
            inner = replace(env, pibar=lat.join(env.pibar, e.index))
            body = self.infer(inner, e.body, depth + 1)
            name = "ret-2" if sys is System.DCCDC else "ret"
            return self.record(depth, self.rule(name), e, Weak(e.index, body))
        if isinstance(e, Bind):
            return self.infer_bind(env, e, depth)
        if isinstance(e, Weaken):
            if sys is not System.DCCDC:
                raise self.not_in_system(e, "weaken")
            t = self.resolve(self.infer(env, e.body, depth + 1))
            if not isinstance(t, Strong):
                raise TypeMismatch(self.rule("weaken"), f"expected T[l](s), found {self.show(t)}", e.span)
            if not lat.is_level(t.index):
                raise TypeMismatch(self.rule("weaken"), f"weaken needs a level-indexed protection, found {self.idx(t.index)}", e.span)
            out = Strong(lat.beta(t.index), Weak(t.index, t.body))
            return self.record(depth, self.rule("weaken"), e, out)
        if isinstance(e, Taint):
            if not env.allow_taint:
                raise self.not_in_system(e, "the internal taint form")
            t = self.infer(env, e.body, depth + 1)
            return self.record(depth, self.rule("taint"), e, self.push(t, e.index))
        raise TypeError(f"not a term: {e!r}")

    def infer_app(self, env: TypingEnv, e: App, depth: int) -> Type:
        if isinstance(e.fn, Abs):
            # a directly applied lambda may take a more qualified argument
            # than its annotation; the body is then checked at that type
            ann = self.wf_type(self.system, e.fn.ann, e.fn)
            ta = self.infer(env, e.arg, depth + 1)
            if not self.unify(ann, ta) and self.raises(ann, self.resolve(ta)):
                body = self.infer(env.extend(e.fn.var, self.resolve(ta)), e.fn.body, depth + 2)
                self.record(depth + 1, self.rule("abs"), e.fn, Fun(ta, body))
                return self.record(depth, self.rule("app"), e, body)
            tf = self.infer(env, e.fn, depth + 1)
        else:
            tf = self.infer(env, e.fn, depth + 1)
            ta = self.infer(env, e.arg, depth + 1)
        f = self.resolve(tf)
        if not isinstance(f, Fun):
            f = self.default(f)
            raise TypeMismatch(self.rule("app"), f"expected a function, found {self.show(f)}", e.span)
        if not self.unify(f.dom, ta):
            raise TypeMismatch(
                self.rule("app"),
                f"argument has type {self.show(ta)}, expected {self.show(f.dom)}",
                e.arg.span,  # type: ignore[attr-defined]
            )
        return self.record(depth, self.rule("app"), e, f.cod)

    def raises(self, lo: Type, hi: Type) -> bool:
        """``hi`` is ``lo`` with some qualifiers raised (same erased shape)."""
        lat = self.lat
        if isinstance(hi, Open):
            if isinstance(lo, Open):
                return lat.leq(lo.index, hi.index) and lo.body == hi.body
            return lo == hi.body
        if isinstance(lo, Open) or type(lo) is not type(hi):
            return False
        if isinstance(lo, UnitT):
            return True
        if isinstance(lo, (Strong, Weak)):
            return lo.index == hi.index and self.raises(lo.body, hi.body)  # type: ignore[union-attr]
        if isinstance(lo, Fun):
            return lo.dom == hi.dom and self.raises(lo.cod, hi.cod)  # type: ignore[union-attr]
        if isinstance(lo, Sum):
            return lo == hi
        if isinstance(lo, Prod):
            return self.raises(lo.left, hi.left) and self.raises(lo.right, hi.right)  # type: ignore[union-attr]
        return False

    def infer_case(self, env: TypingEnv, e: Case, depth: int) -> Type:
        lat = self.lat
        t = self.resolve(self.infer(env, e.scrut, depth + 1))
        if isinstance(t, Sum):
            sum_t, q = t, lat.bottom
        elif isinstance(t, Open) and isinstance(t.body, Sum) and self.system is not System.DCC:
            sum_t, q = t.body, t.index
        else:
            t = self.default(t)
            raise TypeMismatch(self.rule("case"), f"scrutinee must be a sum, found {self.show(t)}", e.scrut.span)  # type: ignore[attr-defined]
        if self.system is System.DCCCD:
            if q != lat.bottom and lat.leq(env.sigma, q):
                cond = f"{self.idx(q)} ⋢ ⊥ ⇒ Σ ⋢ {self.idx(q)} (Σ = {self.idx(env.sigma)})"
                raise SideConditionFailed(self.rule("case"), cond, e.span)
            if q == lat.bottom and lat.leq(env.sigma, q):
                self.notes.append(
                    f"{self.rule('case')} at {show_term(e, lat)}: accepted only because of the "
                    f"guard l ⋢ ⊥; the unguarded condition Σ ⋢ l fails with Σ = l = {self.idx(q)}"
                )
        left = self.push(sum_t.left, q)
        right = self.push(self.resolve(sum_t).right, q) if isinstance(self.resolve(sum_t), Sum) else sum_t.right
        t1 = self.infer(env.extend(e.var, left), e.left, depth + 1)
        t2 = self.infer(env.extend(e.var, right), e.right, depth + 1)
        if not self.unify(t1, t2):
            raise TypeMismatch(
                self.rule("case"), f"branches disagree: {self.show(t1)} vs {self.show(t2)}", e.span
            )
        return self.record(depth, self.rule("case"), e, t1)

    def infer_bind(self, env: TypingEnv, e: Bind, depth: int) -> Type:
        lat = self.lat
        sys = self.system
        t = self.resolve(self.infer(env, e.bound, depth + 1))
        if sys is System.DCC or (sys is System.DCCDC and isinstance(t, Strong)):
            name = "bind" if sys is System.DCC else "bind-1"
            return self.bind_strong(env, e, t, depth, name)
        if sys is System.DCCD or sys is System.DCCDC:
            name = "bind" if sys is System.DCCD else "bind-2"
            if not isinstance(t, Weak):
                t = self.default(t)
                raise TypeMismatch(self.rule(name), f"expected W[l](s), found {self.show(t)}", e.bound.span)  # type: ignore[attr-defined]
            body = self.infer(env.extend(e.var, self.push(t.body, t.index)), e.body, depth + 1)
            body = self.default(body)
            if not (lat.leq(t.index, env.pibar) or weakly_protected_at(t.index, body, lat)):
                cond = f"{self.idx(t.index)} ≤ W[{self.idx(env.pibar)}]({self.show(body)})"
                raise SideConditionFailed(self.rule(name), cond, e.span)
            return self.record(depth, self.rule(name), e, body)
        # DCC^cd: bind-old first, then bind-new
        saved = (dict(self.subst), len(self.steps), len(self.notes))
        try:
            return self.bind_strong(env, e, t, depth, "bind-old")
        except CheckError as first:
            self.subst, steps, notes = dict(saved[0]), saved[1], saved[2]
            del self.steps[steps:]
            del self.notes[notes:]
            if not isinstance(t, Strong):
                raise
            try:
                inner = replace(env, sigma=lat.meet(env.sigma, t.index)).extend(
                    e.var, self.push(t.body, t.index)
                )
                body = self.default(self.infer(inner, e.body, depth + 1))
                if not (lat.leq(t.index, env.pi) or weakly_protected_at(t.index, body, lat)):
                    cond = f"{self.idx(t.index)} ≤ T[{self.idx(env.pi)}]({self.show(body)})"
                    raise SideConditionFailed(self.rule("bind-new"), cond, e.span)
                return self.record(depth, self.rule("bind-new"), e, body)
            except CheckError as second:
                raise SideConditionFailed(
                    self.rule("bind"),
                    "bind-old and bind-new both failed",
                    e.span,
                    f"{self.rule('bind')}: no bind rule applies; bind-old: {first}; bind-new: {second}",
                ) from None

    def bind_strong(self, env: TypingEnv, e: Bind, t: Type, depth: int, name: str) -> Type:
        lat = self.lat
        if not isinstance(t, Strong):
            t = self.default(t)
            raise TypeMismatch(self.rule(name), f"expected T[l](s), found {self.show(t)}", e.bound.span)  # type: ignore[attr-defined]
        body = self.default(self.infer(env.extend(e.var, t.body), e.body, depth + 1))
        if not (lat.leq(t.index, env.pi) or protected_at(t.index, body, lat)):
            cond = f"{self.idx(t.index)} ⪯ T[{self.idx(env.pi)}]({self.show(body)})"
            raise SideConditionFailed(self.rule(name), cond, e.span)
        return self.record(depth, self.rule(name), e, body)

"""Desk-scale checks of the soundness, embedding and blame theorems.

Each suite instantiates a theorem's quantifiers with enumerated closed
terms (sizes 1, 2, ... up to ``Bounds.size``), argument values and levels,
and decides the conclusion with the checker and the semantic oracles.
Before each size the driver projects the cost of all remaining sizes from
the growth observed so far; if that would overrun ``Bounds.budget`` it
raises ``BoundsTooLarge`` carrying the report of everything verified up to
then.

Besides ``T1`` ... ``T8`` there are three property suites: ``LEAK`` (the
leak family), ``ORACLE`` (indistinguishability against brute-force
observation) and ``META`` (subject reduction, determinism, taint erasure,
normalization).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable, Optional

from dcc.corpus import CORPUS, lookup, program_term, run_case
from dcc.enumerate import BoundsTooLarge, EnumConfig, default_config, enumerator, first_order_types, leak_types
from dcc.evaluate import evaluate, evaluate_data, step
from dcc.lattice import Index, IndexLattice, make_indices
from dcc.normalize import discharge_covered, is_canonical_type, normalize_taint, normalize_type
from dcc.oracles import (
    DepthTooSmall,
    OracleConfig,
    brute_force_distinguishable,
    enum_values,
    indistinguishable,
    safe,
)
from dcc.syntax import (
    UNIT,
    UNITV,
    Abs,
    App,
    Bind,
    Fun,
    Inj,
    Open,
    Strong,
    StrongRet,
    Sum,
    Term,
    Type,
    Var,
    Weak,
    WeakRet,
    Weaken,
    alpha_eq,
    is_first_order,
    show_term,
    show_type,
    type_children,
    type_size,
)
from dcc.transform import (
    TransformError,
    blame_of,
    erase,
    erase_taints,
    has_negative_protection,
    identity_leak,
    leak_gen,
    volpano_translate,
    weaken_translate,
)
from dcc.typecheck import System, TypingEnv, check

SCHEMA = "dcc-artifact/1"
BOOL = Sum(UNIT, UNIT)
THEOREMS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8")
SUITES = THEOREMS + ("LEAK", "ORACLE", "META")


@dataclass(frozen=True)
class Bounds:
    size: int = 7
    lattice: str = "two"
    value_depth: int = 4
    # seconds; the driver refuses a size whose projected cost would overrun it
    budget: float = 600.0
    # growth factor assumed per size step until timings are large enough to measure
    min_growth: float = 4.0
    fail_fast: bool = True
    # systems the META suite enumerates
    systems: tuple[str, ...] = ("dcc", "dccd", "dccdc", "dcccd")


@dataclass(frozen=True)
class Counterexample:
    term: str
    levels: str
    verdict: str


@dataclass
class SuiteReport:
    theorem: str
    bounds: Bounds
    completed_size: int = 0
    instances: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)
    size_seconds: list[float] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples and self.completed_size >= self.bounds.size

    @property
    def seconds(self) -> float:
        return sum(self.size_seconds)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "theorem": self.theorem,
            "ok": self.ok,
            "bounds": asdict(self.bounds),
            "completed_size": self.completed_size,
            "instances": self.instances,
            "seconds": round(self.seconds, 3),
            "counterexamples": [asdict(c) for c in self.counterexamples],
            "notes": list(self.notes),
        }


class _Run:
    def __init__(self, theorem: str, bounds: Bounds, lat: IndexLattice):
        self.lat = lat
        self.bounds = bounds
        self.report = SuiteReport(theorem, bounds)
        self.ocfg = OracleConfig(depth=bounds.value_depth)
        # instances outside a theorem's hypotheses, reported as a note
        self.skipped = 0

    @property
    def stop(self) -> bool:
        return self.bounds.fail_fast and bool(self.report.counterexamples)

    def count(self, k: int = 1) -> None:
        self.report.instances += k

    def fail(self, term: Term | str, levels: str, verdict: str, lat: Optional[IndexLattice] = None) -> None:
        text = term if isinstance(term, str) else show_term(term, lat or self.lat)
        self.report.counterexamples.append(Counterexample(text, levels, verdict))

    def note(self, text: str) -> None:
        self.report.notes.append(text)

    def sized(self, *bodies: Callable[[int], None]) -> None:
        """Run every body at sizes 1..bounds.size, projecting cost first."""
        rep, b = self.report, self.bounds
        for n in range(1, b.size + 1):
            if self.stop:
                return
            times = rep.size_seconds
            if len(times) >= 2:
                last, prev = times[-1], times[-2]
                growth = max(last / prev, b.min_growth) if prev >= 0.05 else b.min_growth
                # sizes n..bounds.size, each growth times the previous
                projected = sum(last * growth**k for k in range(1, b.size - n + 2))
                if rep.seconds + projected > b.budget:
                    raise BoundsTooLarge(
                        f"{rep.theorem}: sizes {n}..{b.size} projected at {projected:.0f}s after "
                        f"{rep.seconds:.0f}s (growth x{growth:.1f} per size); budget {b.budget:.0f}s; "
                        f"verified up to size {n - 1}",
                        rep,
                    )
            t0 = time.perf_counter()
            for body in bodies:
                body(n)
                if self.stop:
                    break
            rep.size_seconds.append(time.perf_counter() - t0)
            if not self.stop:
                rep.completed_size = n


# ------------------------------------------------------------ shared instance checks


def _observers(lat: IndexLattice, l: Index, product: bool) -> list[Index]:
    pool = lat.indices() if product else lat.levels()
    return [o for o in pool if not lat.leq(l, o)]


def _closed_env(lat: IndexLattice, system: System) -> TypingEnv:
    return TypingEnv(lat, system)


def _protected_functions(
    run: _Run, cfg: EnumConfig, kind: type, n: int, keep: Callable[[Type], bool] = lambda a: True, first_order: bool = True
) -> Iterable[tuple[Term, Fun]]:
    """Closed terms of size ``n`` typed ``P[l](s) -> t``, ``s`` and ``t`` first order unless told otherwise.

    ``keep`` filters the annotation of the outer lambda.
    """
    lat = run.lat
    en = enumerator(lat, cfg)
    env = _closed_env(lat, cfg.system)
    anns = [a for a in cfg.annotations if isinstance(a, kind) and keep(a)]
    for e, _ in en.closed_with(anns, n):
        r = check(env, e)
        if not r.ok:
            continue
        t = normalize_type(r.type, lat)  # type: ignore[arg-type]
        if not (isinstance(t, Fun) and isinstance(t.dom, kind)):
            continue
        if not first_order or (is_first_order(t.dom.body) and is_first_order(t.cod)):
            yield e, t


def _noninterference(run: _Run, cfg: EnumConfig, blame_premise: bool = False) -> Callable[[int], None]:
    """e : T[l](s) -> t applied to eta[l] v1 and eta[l] v2 is related at every l' above which l is not."""
    lat = run.lat

    def body(n: int) -> None:
        for e, t in _protected_functions(run, cfg, Strong, n):
            l = t.dom.index  # type: ignore[attr-defined]
            if blame_premise and lat.leq(l, lat.beta_inv(blame_of(t.cod, lat))):
                continue
            vals = enum_values(t.dom.body, lat, run.bounds.value_depth)  # type: ignore[attr-defined]
            for o in _observers(lat, l, product=blame_premise):
                for v1, v2 in itertools.combinations(vals, 2):
                    run.count()
                    a1, a2 = App(e, StrongRet(l, v1)), App(e, StrongRet(l, v2))
                    if not indistinguishable(a1, a2, t.cod, o, lat, run.ocfg):
                        run.fail(
                            e,
                            f"l={lat.show(l)} observer={lat.show(o)}",
                            f"distinguishes {show_term(v1, lat)} from {show_term(v2, lat)} at {show_type(t.cod, lat)}",
                        )
                        return

    return body


def _weak_safety(run: _Run, cfg: EnumConfig) -> Callable[[int], None]:
    """e : W[l](s) -> t applied to weta[l] v is safe at every l' above which l is not."""
    lat = run.lat

    def body(n: int) -> None:
        for e, t in _protected_functions(run, cfg, Weak, n):
            l = t.dom.index  # type: ignore[attr-defined]
            vals = enum_values(t.dom.body, lat, run.bounds.value_depth)  # type: ignore[attr-defined]
            for o in _observers(lat, l, product=False):
                for v in vals:
                    run.count()
                    if not safe(App(e, WeakRet(l, v)), t.cod, o, lat, run.ocfg):
                        run.fail(e, f"l={lat.show(l)} observer={lat.show(o)}", f"unsafe on {show_term(v, lat)}")
                        return

    return body


def _embedding(run: _Run, target: System, translate: Callable) -> Callable[[int], None]:
    """Every closed DCC term e : s checks in ``target`` at translate(s)."""
    lat = run.lat
    cfg = default_config(System.DCC, lat)
    en = enumerator(lat, cfg)
    regs = en.regs(lat.bottom, lat.bottom, lat.top)
    src_env, dst_env = _closed_env(lat, System.DCC), _closed_env(lat, target)

    def body(n: int) -> None:
        for e, _ in en.terms((), regs, n):
            r = check(src_env, e)
            if not r.ok:
                continue
            run.count()
            _embedding_instance(run, e, r.type, dst_env, translate)  # type: ignore[arg-type]
            if run.stop:
                return

    return body


def _embedding_instance(run: _Run, e: Term, s: Type, env: TypingEnv, translate: Callable) -> None:
    lat = run.lat
    want = normalize_type(translate(s), lat)
    r = check(env, translate(e))
    if not r.ok:
        run.fail(e, "", f"translation rejected: {r.describe(lat)}")
    elif discharge_covered(r.type, lat) != discharge_covered(want, lat):  # type: ignore[arg-type]
        run.fail(e, "", f"translation typed {show_type(r.type, lat)}, expected {show_type(want, lat)}")  # type: ignore[arg-type]


# ------------------------------------------------------------ theorems


def _t1(run: _Run) -> None:
    run.sized(_noninterference(run, default_config(System.DCC, run.lat)))


def _t2(run: _Run) -> None:
    run.sized(_weak_safety(run, default_config(System.DCCD, run.lat)))


def _t3(run: _Run) -> None:
    lat = run.lat
    env = _closed_env(lat, System.DCCD)
    for p in CORPUS:
        for ex in p.cases:
            if ex.system is System.DCC and ex.accepted and not ex.defs:
                e = program_term(ex, lat)
                r = check(_closed_env(lat, System.DCC), e)
                if r.ok:
                    run.count()
                    _embedding_instance(run, e, r.type, env, weaken_translate)  # type: ignore[arg-type]
    run.sized(_embedding(run, System.DCCD, weaken_translate))


def _image_checks(run: _Run, e: Term, arg: Term, t: Type, l: Index) -> None:
    """Evaluate ``e (weta[l] arg)`` with taints and check the image of the result."""
    lat = run.lat
    t = discharge_covered(t, lat)
    if _has_open(t):
        # no DCC image of the result type; outside the theorem
        run.skipped += 1
        return
    v = evaluate_data(App(e, WeakRet(l, arg)), lat, taint=True)
    img = volpano_translate(v)
    want = normalize_type(volpano_translate(t), lat)
    r = check(_closed_env(lat, System.DCC), img, expected=want)
    run.count()
    if not r.ok:
        run.fail(e, f"l={lat.show(l)}", f"on {show_term(arg, lat)}: image {show_term(img, lat)} rejected: {r.describe(lat)}")


def _t4(run: _Run) -> None:
    lat = run.lat
    cfg = default_config(System.DCCD, lat)
    en = enumerator(lat, cfg)
    regs = en.regs(lat.bottom, lat.bottom, lat.top)
    env = _closed_env(lat, System.DCCD)
    programs: list[tuple[Term, Fun]] = []
    for p in CORPUS:
        for ex in p.cases:
            if ex.system is System.DCCD and ex.accepted:
                e = program_term(ex, lat)
                r = check(env, e)
                t = normalize_type(r.type, lat) if r.ok else None  # type: ignore[arg-type]
                if isinstance(t, Fun) and isinstance(t.dom, Weak) and not has_negative_protection(t.cod):
                    programs.append((e, t))

    def corpus_args(n: int) -> None:
        # every enumerated argument of the payload type, for each corpus program
        for e, t in programs:
            s = t.dom.body  # type: ignore[attr-defined]
            for arg, _ in en.terms((), regs, n):
                if check(env, arg, expected=s).ok:
                    _image_checks(run, e, arg, t.cod, t.dom.index)  # type: ignore[attr-defined]
                    if run.stop:
                        return

    def enumerated_functions(n: int) -> None:
        for e, t in _protected_functions(run, cfg, Weak, n):
            if has_negative_protection(t.cod):
                continue
            for v in enum_values(t.dom.body, lat, run.bounds.value_depth):  # type: ignore[attr-defined]
                _image_checks(run, e, v, t.cod, t.dom.index)  # type: ignore[attr-defined]
                if run.stop:
                    return

    _dropped_protection(run)
    run.sized(corpus_args, enumerated_functions)


def _dropped_protection(run: _Run) -> None:
    """Without its inner protection, some trace of k has an untypable image."""
    lat = run.lat
    ex = lookup("k-dropped").cases[0]
    e = program_term(ex, lat)
    assert isinstance(e, Abs) and isinstance(e.ann, Weak)
    s = e.ann.body
    t = normalize_type(volpano_translate(Sum(UNIT, s)), lat)
    rejected = []
    for v in enum_values(s, lat, run.bounds.value_depth):
        img = volpano_translate(evaluate_data(App(e, WeakRet(e.ann.index, v)), lat, taint=True))
        run.count()
        if not check(_closed_env(lat, System.DCC), img, expected=t).ok:
            rejected.append(show_term(img, lat))
    if rejected:
        run.note(f"k-dropped: untypable images {rejected}")
    else:
        run.fail(e, "", "every trace image of k-dropped typechecks in DCC")


def _t5(run: _Run) -> None:
    lat = run.lat
    cfg = replace(default_config(System.DCCDC, lat), weaken=False)
    run.sized(_noninterference(run, cfg), _weak_safety(run, cfg))


def _t6(run: _Run) -> None:
    _blame_program(run, make_indices("two", "preserve"), expect_blame="!H")
    _blame_program(run, make_indices("diamond", "preserve"))
    run.sized(_noninterference(run, default_config(System.DCCDC, run.lat), blame_premise=True))


def _blame_program(run: _Run, lat: IndexLattice, expect_blame: Optional[str] = None) -> None:
    """The weaken-then-reprotect program under every level of ``lat``.

    Its blame must be beta of the weakened level; placed under an input
    protected at any l not below that level, it is related at every
    product observer not above l.
    """
    for m in lat.levels():
        if m == lat.bottom:
            continue
        progs = [Bind("x", Weaken(StrongRet(m, Inj(i, UNITV))), StrongRet(lat.beta(m), Var("x"))) for i in (1, 2)]
        r = check(_closed_env(lat, System.DCCDC), progs[0])
        if not r.ok:
            run.fail(progs[0], f"m={lat.show(m)}", f"rejected: {r.describe(lat)}", lat)
            continue
        t = normalize_type(r.type, lat)  # type: ignore[arg-type]
        b = blame_of(t, lat)
        if b != lat.beta(m) or (expect_blame is not None and m == lat.top and lat.show(b) != expect_blame):
            run.fail(progs[0], f"m={lat.show(m)}", f"blame {lat.show(b)}")
            continue
        for l in lat.levels():
            if lat.leq(l, lat.beta_inv(b)):
                continue
            for o in _observers(lat, l, product=True):
                for p in progs:
                    f = Abs("y", Strong(l, BOOL), p)
                    for v1, v2 in itertools.combinations(enum_values(BOOL, lat), 2):
                        run.count()
                        if not indistinguishable(App(f, StrongRet(l, v1)), App(f, StrongRet(l, v2)), t, o, lat):
                            run.fail(f, f"l={lat.show(l)} observer={lat.show(o)}", "distinguishable", lat)


def _t7(run: _Run) -> None:
    lat = run.lat
    cfg = default_config(System.DCCDC, lat)
    # the premise fails at the top level, so weak inputs at every level are needed
    extra = tuple(Weak(l, BOOL) for l in lat.levels() if Weak(l, BOOL) not in cfg.annotations)
    cfg = replace(cfg, annotations=cfg.annotations + extra)
    env = _closed_env(lat, System.DCCDC)

    # at l = top no blame satisfies the premise, so those inputs are skipped
    def below_top(a: Type) -> bool:
        return a.index != lat.top  # type: ignore[attr-defined]

    def body(n: int) -> None:
        for ep, t in _protected_functions(run, cfg, Weak, n, keep=below_top, first_order=False):
            l = t.dom.index  # type: ignore[attr-defined]
            if lat.leq(lat.beta_inv(blame_of(t.cod, lat)), l):
                continue
            e = StrongRet(l, Inj(1, UNITV))
            comp = App(ep, Bind("x", Weaken(e), Var("x")))
            run.count()
            r = check(env, comp, expected=t.cod)
            if r.ok:
                run.fail(comp, f"l={lat.show(l)}", f"derivable at {show_type(t.cod, lat)}")
                return

    run.sized(body)


def _t8(run: _Run) -> None:
    lat = run.lat
    for name in ("switch", "const-inj1", "const-inj2"):
        for ex in lookup(name).cases:
            res = run_case(lookup(name), ex)
            run.count()
            if not res.passed:
                run.fail(ex.source, ex.system.value, res.detail or "verdict differs")
    run.sized(
        _embedding(run, System.DCCCD, lambda x: x),
        _noninterference(run, default_config(System.DCCCD, lat)),
    )


# ------------------------------------------------------------ property suites


def _leak(run: _Run) -> None:
    lat = run.lat
    env = _closed_env(lat, System.DCCD)
    types = leak_types(run.bounds.size, lat)

    def body(n: int) -> None:
        for t in types:
            if type_size(t) != n:
                continue
            for l in lat.levels():
                run.count()
                target = normalize_type(Fun(Weak(l, t), erase(t)), lat)
                try:
                    g = leak_gen(l, t, lat)
                except TransformError as err:
                    run.fail(show_type(t, lat), f"l={lat.show(l)}", f"no leak term: {err}")
                    continue
                r = check(env, g, expected=target)
                if not r.ok:
                    run.fail(g, f"t={show_type(t, lat)} l={lat.show(l)}", f"leak term rejected: {r.describe(lat)}")
                if erase(t) != t or _has_sum(t):
                    ident = check(env, identity_leak(l, t), expected=target)
                    if ident.ok:
                        run.fail(identity_leak(l, t), f"t={show_type(t, lat)} l={lat.show(l)}", "identity leak accepted")

    run.sized(body)


def _has_open(t: Type) -> bool:
    return isinstance(t, Open) or any(_has_open(c) for c in type_children(t))


def _has_sum(t: Type) -> bool:
    return isinstance(t, (Sum, Open)) or any(_has_sum(c) for c in type_children(t))


def _oracle(run: _Run) -> None:
    lat = run.lat
    types = first_order_types(run.bounds.size, lat, "hybrid")

    def body(n: int) -> None:
        for t in types:
            if type_size(t) != n:
                continue
            try:
                vals = enum_values(t, lat, run.bounds.value_depth)
            except DepthTooSmall:
                # every value of t is nested deeper than the value bound
                run.skipped += 1
                continue
            for o in lat.levels():
                for v1, v2 in itertools.combinations_with_replacement(vals, 2):
                    run.count()
                    rel = indistinguishable(v1, v2, t, o, lat, run.ocfg)
                    dist = brute_force_distinguishable(v1, v2, t, o, lat)
                    if rel == dist:
                        run.fail(
                            f"{show_term(v1, lat)} vs {show_term(v2, lat)}",
                            f"t={show_type(t, lat)} observer={lat.show(o)}",
                            f"relation says {rel}, brute force distinguishes: {dist}",
                        )
                        return

    run.sized(body)


def _meta(run: _Run) -> None:
    lat = run.lat
    bodies = []
    for name in run.bounds.systems:
        system = System(name)
        cfg = default_config(system, lat)
        bodies.append(_meta_body(run, system, cfg))
    run.sized(*bodies)


def _meta_body(run: _Run, system: System, cfg: EnumConfig) -> Callable[[int], None]:
    lat = run.lat
    en = enumerator(lat, cfg)
    regs = en.regs(lat.bottom, lat.bottom, lat.top)
    env = _closed_env(lat, system)

    def body(n: int) -> None:
        for e, _ in en.terms((), regs, n):
            r = check(env, e)
            if not r.ok:
                continue
            run.count()
            verdict = _meta_instance(e, r.type, env, lat)  # type: ignore[arg-type]
            if verdict is not None:
                run.fail(e, system.value, verdict)
                return

    return body


def _meta_instance(e: Term, t: Type, env: TypingEnv, lat: IndexLattice) -> Optional[str]:
    nt = normalize_type(t, lat)
    if normalize_type(nt, lat) != nt or not is_canonical_type(nt, lat):
        return f"normalization not idempotent on {show_type(t, lat)}"
    cur: Optional[Term] = e
    while cur is not None:
        r = check(env, cur)
        if not r.ok:
            return f"reduct {show_term(cur, lat)} ill-typed: {r.describe(lat)}"
        if normalize_type(r.type, lat) != nt:  # type: ignore[arg-type]
            return f"reduct {show_term(cur, lat)} has type {show_type(r.type, lat)}, not {show_type(nt, lat)}"  # type: ignore[arg-type]
        cur = step(cur, lat, taint=False)
    plain = evaluate(e, lat, taint=False)
    if not alpha_eq(plain, evaluate(e, lat, taint=False), lat):
        return "evaluation is not deterministic"
    tainted = evaluate(e, lat, taint=True)
    if normalize_taint(tainted, lat) != tainted:
        return f"result {show_term(tainted, lat)} not taint-normal"
    if not alpha_eq(erase_taints(tainted), plain, lat):
        return f"erasing taints gives {show_term(erase_taints(tainted), lat)}, plain run gives {show_term(plain, lat)}"
    return None


# ------------------------------------------------------------ entry point

_SUITES: dict[str, tuple[Callable[[_Run], None], str]] = {
    "T1": (_t1, "preserve"),
    "T2": (_t2, "preserve"),
    "T3": (_t3, "preserve"),
    "T4": (_t4, "preserve"),
    "T5": (_t5, "preserve"),
    "T6": (_t6, "preserve"),
    "T7": (_t7, "flip"),
    "T8": (_t8, "preserve"),
    "LEAK": (_leak, "preserve"),
    "ORACLE": (_oracle, "preserve"),
    "META": (_meta, "preserve"),
}


def run_theorem_suite(theorem: str, bounds: Bounds = Bounds()) -> SuiteReport:
    """Check one theorem or property suite exhaustively within ``bounds``.

    Raises ``BoundsTooLarge`` (with the partial report attached) when the
    projected cost of the remaining sizes overruns the budget.
    """
    if theorem not in _SUITES:
        raise ValueError(f"unknown suite {theorem!r}; expected one of {', '.join(SUITES)}")
    fn, order = _SUITES[theorem]
    run = _Run(theorem, bounds, make_indices(bounds.lattice, order))
    try:
        fn(run)
    finally:
        if run.skipped:
            run.note(f"{run.skipped} instance(s) outside the hypotheses skipped")
    return run.report


__all__ = [
    "BoundsTooLarge",
    "Bounds",
    "Counterexample",
    "SCHEMA",
    "SUITES",
    "SuiteReport",
    "THEOREMS",
    "run_theorem_suite",
]

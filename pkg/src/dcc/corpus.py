"""Named example programs with their expected verdicts.

Every program is written at the two-point lattice with the protection level
instantiated to ``H``.  An expectation may carry top-level definitions: each
is checked in the empty context extended with the earlier ones, and enters
the program's context with the type it got.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from dcc.lattice import IndexLattice, make_indices
from dcc.normalize import normalize_type
from dcc.parse import parse_term, parse_type
from dcc.syntax import Term, Type, show_type, subst
from dcc.typecheck import CheckReport, System, TypingEnv, check


@dataclass(frozen=True)
class Expectation:
    system: System
    source: str
    accepted: bool
    # normalized type the checker must report when ``accepted``
    type: Optional[str] = None
    defs: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Program:
    name: str
    cases: tuple[Expectation, ...]
    lattice: str = "two"
    blame_order: str = "preserve"
    summary: str = ""


@dataclass(frozen=True)
class CaseResult:
    program: Program
    expectation: Expectation
    report: CheckReport
    passed: bool
    detail: str = field(default="")


# -- building blocks

F = "fun x:T[H](unit+unit). bind y = x in y"
G = "fun x:T[H](unit+unit). bind y = x in case y of z. inj1 () | z. inj2 ()"
FW = "fun x:W[H](unit+unit). bind y = x in y"
GW = "fun x:W[H](unit+unit). bind y = x in case y of z. inj1 () | z. inj2 ()"
H_ = "fun x:T[H](unit+unit). bind y = weaken x in case y of z. inj1 () | z. inj2 ()"
M = "fun x:T[L](unit+unit). eta[H] (bind y = x in case y of z. inj1 () | z. inj2 ())"
# the payload type is a sum so that releasing it unprotected is visible
K = "fun x:W[H](unit+(unit+unit)). bind y = x in case y of z. inj1 () | z. inj2 (weta[H] z)"
K_DROPPED = "fun x:W[H](unit+(unit+unit)). bind y = x in case y of z. inj1 () | z. inj2 z"
SWITCH = "fun x:T[H](unit+unit). fun b:unit+unit. bind b' = x in match b b'"


def _switch_defs(arg: str) -> tuple[tuple[str, str], ...]:
    return (
        ("not", f"fun b':{arg}. case b' of u. inj2 () | u. inj1 ()"),
        ("match", f"fun b:unit+unit. fun b':{arg}. case b of u. inj2 (eta[H] (not b')) | u. inj1 ()"),
    )


BLAME = "bind x = weaken (eta[H] inj1 ()) in eta[!H] x"


def _program(name: str, *cases: Expectation, summary: str = "", lattice: str = "two") -> Program:
    return Program(name, tuple(cases), lattice=lattice, summary=summary)


D, DD, DC, CD = System.DCC, System.DCCD, System.DCCDC, System.DCCCD

CORPUS: tuple[Program, ...] = (
    _program(
        "f",
        Expectation(D, F, False),
        Expectation(DD, FW, False),
        summary="returns the unprotected payload",
    ),
    _program(
        "g",
        Expectation(D, G, False),
        Expectation(DD, GW, True, "W[H](unit + unit) -> unit + unit"),
        summary="returns only the constructor of the payload",
    ),
    _program(
        "f'",
        Expectation(D, f"fun x:T[H](unit+unit). eta[H] (({F}) x)", True, "T[H](unit + unit) -> T[H](unit + unit)"),
        Expectation(DD, f"fun x:W[H](unit+unit). weta[H] (({FW}) x)", True, "W[H](unit + unit) -> W[H](unit + unit)"),
        summary="f with its result protected again",
    ),
    _program(
        "g'",
        Expectation(D, f"fun x:T[H](unit+unit). eta[H] (({G}) x)", True, "T[H](unit + unit) -> T[H](unit + unit)"),
        summary="g with its result protected again",
    ),
    _program(
        "h",
        Expectation(DC, H_, False),
        summary="branches on a weakened argument; the blame on weaken rejects it",
    ),
    _program(
        "m",
        Expectation(D, M, True, "T[L](unit + unit) -> T[H](unit + unit)"),
        summary="derives one protected bit of its argument",
    ),
    _program(
        "n",
        Expectation(DC, f"fun x:T[L](unit+unit). ({H_}) (({M}) x)", False),
        summary="composes h and m",
    ),
    _program(
        "k",
        Expectation(DD, K, True, "W[H](unit + (unit + unit)) -> unit + W[H](unit + unit)"),
        summary="weakly secure: re-protects the payload it releases",
    ),
    _program(
        "k-dropped",
        Expectation(DD, K_DROPPED, False),
        summary="k without the inner protection",
    ),
    _program(
        "switch",
        Expectation(D, SWITCH, False, defs=_switch_defs("unit+unit")),
        Expectation(
            CD,
            SWITCH,
            True,
            "T[H](unit + unit) -> unit + unit -> unit + T[H](unit + unit)",
            defs=_switch_defs("(unit+unit)^H"),
        ),
        summary="unwraps early and protects inside one branch",
    ),
    _program(
        "strengthen",
        Expectation(DC, "fun x:W[H](unit). bind y = x in eta[H] y", True, "W[H](unit) -> T[H](unit)"),
        summary="turns weak protection into strong protection",
    ),
    _program(
        "blame",
        Expectation(DC, BLAME, True, "T[!H](unit + unit)"),
        summary="weakens a protected constant and re-protects it at the blame",
    ),
    _program(
        "const-inj1",
        Expectation(D, "fun x:T[H](unit+unit). bind y = x in inj1 ()", False),
        Expectation(CD, "fun x:T[H](unit+unit). bind y = x in inj1 ()", True, "T[H](unit + unit) -> unit + unit"),
        summary="unwraps and ignores the payload",
    ),
    _program(
        "const-inj2",
        Expectation(D, "fun x:T[H](unit+unit). bind y = x in inj2 ()", False),
        Expectation(CD, "fun x:T[H](unit+unit). bind y = x in inj2 ()", True, "T[H](unit + unit) -> unit + unit"),
    ),
)


def lookup(name: str) -> Program:
    for p in CORPUS:
        if p.name == name:
            return p
    raise KeyError(name)


def program_term(e: Expectation, lat: IndexLattice, inline: bool = False) -> Term:
    """The program, with its definitions substituted in when ``inline``."""
    term = parse_term(e.source, lat)
    if inline:
        for name, src in reversed(e.defs):
            term = subst(term, name, parse_term(src, lat))
    return term


def definitions_env(e: Expectation, lat: IndexLattice) -> tuple[TypingEnv, Optional[CheckReport]]:
    """The context holding the checked definitions, or the first failing report."""
    env = TypingEnv(lat, e.system)
    for name, src in e.defs:
        r = check(env, parse_term(src, lat))
        if not r.ok:
            return env, r
        env = env.extend(name, r.type)  # type: ignore[arg-type]
    return env, None


def expected_type(e: Expectation, lat: IndexLattice) -> Optional[Type]:
    return None if e.type is None else normalize_type(parse_type(e.type, lat), lat)


def run_case(p: Program, e: Expectation, trace: bool = False) -> CaseResult:
    lat = make_indices(p.lattice, p.blame_order)
    env, failed = definitions_env(e, lat)
    report = failed or check(env, program_term(e, lat), trace=trace)
    if not e.accepted:
        ok = not report.ok
        detail = "" if ok else f"accepted at {show_type(report.type, lat)}"  # type: ignore[arg-type]
        return CaseResult(p, e, report, ok, detail)
    if not report.ok:
        return CaseResult(p, e, report, False, f"rejected: {report.describe(lat)}")
    want = expected_type(e, lat)
    got = normalize_type(report.type, lat)  # type: ignore[arg-type]
    if want is not None and got != want:
        return CaseResult(p, e, report, False, f"type {show_type(got, lat)}, expected {show_type(want, lat)}")
    return CaseResult(p, e, report, True)


def run_corpus(names: Optional[Iterable[str]] = None, trace: bool = False) -> list[CaseResult]:
    chosen = CORPUS if names is None else tuple(lookup(n) for n in names)
    return [run_case(p, e, trace) for p in chosen for e in p.cases]

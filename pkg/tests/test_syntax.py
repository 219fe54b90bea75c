from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dcc.normalize import (
    discharge_covered,
    is_canonical_taint,
    is_canonical_type,
    normalize_taint,
    normalize_type,
)
from dcc.parse import ParseError, UnknownLevelName, parse_term, parse_type
from dcc.syntax import (
    UNIT,
    UNITV,
    Abs,
    Bind,
    Case,
    Inj,
    Open,
    Strong,
    Sum,
    Taint,
    Var,
    Weak,
    WeakRet,
    alpha_eq,
    free_vars,
    show_term,
    show_type,
    subst,
)
from tests.strategies import TWO, terms, types

BOOL = Sum(UNIT, UNIT)
H, L = TWO.level("H"), TWO.level("L")


# ------------------------------------------------------------ parsing


def test_parse_f():
    e = parse_term("fun x:W[H](unit+unit). bind y = x in y", TWO)
    assert e == Abs("x", Weak(H, BOOL), Bind("y", Var("x"), Var("y")))


def test_parse_unit_and_blame_type():
    assert parse_term("()", TWO) == UNITV
    assert parse_type("T[!H](W[H](unit))", TWO) == Strong(TWO.beta("H"), Weak(H, UNIT))


def test_precedence_and_associativity():
    assert parse_type("unit * unit + unit -> unit", TWO) == parse_type("((unit * unit) + unit) -> unit", TWO)
    assert parse_type("unit -> unit -> unit", TWO) == parse_type("unit -> (unit -> unit)", TWO)
    assert parse_type("unit + unit^H", TWO) == Sum(UNIT, Open(UNIT, H))


def test_parse_error_carries_byte_span():
    with pytest.raises(ParseError) as info:
        parse_term("fun x:unit. (", TWO)
    assert info.value.span.start == 13


def test_unknown_level_name():
    with pytest.raises(UnknownLevelName):
        parse_type("T[Q](unit)", TWO)


def test_term_spans_point_into_source():
    src = "fun x:unit. inj1 x"
    e = parse_term(src, TWO)
    assert src[e.body.span.start : e.body.span.end] == "inj1 x"


@given(types())
def test_type_printing_round_trips(t):
    assert parse_type(show_type(t, TWO), TWO) == t


@given(terms())
def test_term_printing_round_trips(e):
    assert alpha_eq(parse_term(show_term(e, TWO), TWO), e)


# ------------------------------------------------------------ type equations


def test_bottom_qualifier_disappears():
    assert normalize_type(Open(BOOL, L), TWO) == BOOL


def test_covered_qualifier_on_protection_is_dropped():
    assert normalize_type(Open(Weak(H, UNIT), L), TWO) == Weak(H, UNIT)


def test_qualifiers_join():
    assert normalize_type(Open(Open(BOOL, L), H), TWO) == Open(BOOL, H)


def test_qualifiers_push_through_non_sums():
    t = parse_type("(unit * (unit -> unit+unit))^H", TWO)
    assert normalize_type(t, TWO) == parse_type("unit * (unit -> (unit+unit)^H)", TWO)


def test_no_equation_for_sums():
    t = Open(BOOL, H)
    assert normalize_type(t, TWO) == t


@given(types())
def test_normalize_type_is_idempotent_and_canonical(t):
    n = normalize_type(t, TWO)
    assert normalize_type(n, TWO) == n
    assert is_canonical_type(n, TWO)


def test_discharge_covered_reaches_into_sums():
    t = parse_type("W[H]((unit+unit)^H + unit)", TWO)
    assert normalize_type(t, TWO) == t
    assert discharge_covered(t, TWO) == parse_type("W[H]((unit+unit) + unit)", TWO)
    # a qualifier above the protection is kept
    assert discharge_covered(parse_type("W[L]((unit+unit)^H + unit)", TWO), TWO) == parse_type(
        "W[L]((unit+unit)^H + unit)", TWO
    )


# ------------------------------------------------------------ taint equations


def test_taint_equations():
    assert normalize_taint(Taint(UNITV, H), TWO) == UNITV
    assert normalize_taint(Taint(WeakRet(H, Inj(1, UNITV)), L), TWO) == WeakRet(H, Inj(1, UNITV))
    assert normalize_taint(Taint(Taint(Inj(1, UNITV), L), H), TWO) == Taint(Inj(1, UNITV), H)


@given(terms())
def test_normalize_taint_is_idempotent(e):
    n = normalize_taint(e, TWO)
    assert normalize_taint(n, TWO) == n
    assert is_canonical_taint(n, TWO)


# ------------------------------------------------------------ substitution and alpha


def test_subst_examples():
    assert subst(Var("y"), "y", UNITV) == UNITV
    out = subst(Abs("x", UNIT, Var("y")), "y", Var("x"))
    assert isinstance(out, Abs) and out.var != "x" and out.body == Var("x")
    assert subst(Case(Var("y"), "z", Var("z"), Var("y")), "y", UNITV) == Case(UNITV, "z", Var("z"), UNITV)


def test_alpha_eq_examples():
    assert alpha_eq(Abs("x", UNIT, Var("x")), Abs("y", UNIT, Var("y")))
    assert not alpha_eq(Inj(1, UNITV), Inj(2, UNITV))
    assert alpha_eq(Taint(Inj(1, UNITV), TWO.bottom), Inj(1, UNITV), TWO)


@given(terms(), st.sampled_from(["x", "y", "z"]), terms())
def test_subst_removes_the_variable_and_avoids_capture(e, x, v):
    out = subst(e, x, v)
    if x not in free_vars(v):
        assert x not in free_vars(out)
    assert free_vars(out) <= (free_vars(e) - {x}) | free_vars(v)
    if x not in free_vars(e):
        assert alpha_eq(out, e)


@given(terms(), st.sampled_from(["x", "y", "z"]))
def test_subst_of_a_variable_by_itself_is_identity(e, x):
    assert alpha_eq(subst(e, x, Var(x)), e)

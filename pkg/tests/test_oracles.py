from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcc.corpus import F, FW, GW
from dcc.enumerate import first_order_types
from dcc.oracles import (
    UnsupportedType,
    brute_force_distinguishable,
    enum_values,
    indistinguishable,
    safe,
)
from dcc.parse import parse_term, parse_type
from dcc.syntax import show_term
from tests.strategies import TWO

L, H = TWO.level("L"), TWO.level("H")


def T(src):
    return parse_type(src, TWO)


def E(src):
    return parse_term(src, TWO)


def test_enum_values_examples():
    assert [show_term(v, TWO) for v in enum_values(T("unit+unit"), TWO, 2)] == ["inj1 ()", "inj2 ()"]
    assert [show_term(v, TWO) for v in enum_values(T("T[H](unit)"), TWO, 2)] == ["eta[H] ()"]
    assert len(enum_values(T("(unit+unit)*(unit+unit)"), TWO, 3)) == 4


def test_enum_values_are_distinct_functions_at_arrow_types():
    # [DERIVED] 2^2 total functions bool -> bool
    assert len(enum_values(T("unit+unit -> unit+unit"), TWO, 4)) == 4


def test_protected_booleans_look_alike_below_the_protection():
    t = T("T[H](unit+unit)")
    assert indistinguishable(E("eta[H] inj1 ()"), E("eta[H] inj2 ()"), t, L, TWO)
    assert not indistinguishable(E("eta[H] inj1 ()"), E("eta[H] inj2 ()"), t, H, TWO)


def test_distinct_booleans_are_distinguishable():
    assert not indistinguishable(E("inj1 ()"), E("inj2 ()"), T("unit+unit"), L, TWO)


@pytest.mark.parametrize("l", [L, H])
def test_unit_is_always_related(l):
    assert indistinguishable(E("()"), E("(fun x:unit. x) ()"), T("unit"), l, TWO)


def test_f_is_not_related_to_itself():
    assert not indistinguishable(E(F), E(F), T("T[H](unit+unit) -> unit+unit"), L, TWO)


def test_safety_examples():
    assert safe(E("weta[H] (inj1 ())"), T("W[H](unit+unit)"), L, TWO)
    assert not safe(E(FW), T("W[H](unit+unit) -> unit+unit"), L, TWO)
    assert safe(E(GW), T("W[H](unit+unit) -> unit+unit"), L, TWO)
    f_prime = E(f"fun x:W[H](unit+unit). weta[H] (({FW}) x)")
    assert safe(f_prime, T("W[H](unit+unit) -> W[H](unit+unit)"), L, TWO)


def test_tainted_booleans_are_unsafe_below_the_taint():
    assert not safe(E("inj1 () @ H"), T("unit+unit"), L, TWO)
    assert safe(E("inj1 () @ H"), T("unit+unit"), H, TWO)


def test_higher_order_arguments_are_refused():
    with pytest.raises(UnsupportedType):
        indistinguishable(E(F), E(F), T("(unit -> unit) -> unit"), L, TWO)


TYPES = first_order_types(4, TWO, "hybrid")


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TYPES), st.sampled_from(TWO.levels()), st.data())
def test_relation_agrees_with_brute_force_observers(t, l, data):
    vals = enum_values(t, TWO, 4)
    v1, v2 = data.draw(st.sampled_from(vals)), data.draw(st.sampled_from(vals))
    assert indistinguishable(v1, v2, t, l, TWO) != brute_force_distinguishable(v1, v2, t, l, TWO)


@pytest.mark.parametrize("t", ["W[H](unit+unit)", "(unit+unit)^H", "T[H](unit+unit) * (unit+unit)"])
def test_relation_is_an_equivalence_on_values(t):
    ty = T(t)
    vals = enum_values(ty, TWO, 4)
    for l in TWO.levels():
        for a, b in itertools.product(vals, repeat=2):
            assert indistinguishable(a, a, ty, l, TWO)
            assert indistinguishable(a, b, ty, l, TWO) == indistinguishable(b, a, ty, l, TWO)

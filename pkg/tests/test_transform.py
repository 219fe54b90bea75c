from __future__ import annotations

import pytest
from hypothesis import given

from dcc.normalize import normalize_type
from dcc.parse import parse_term, parse_type
from dcc.syntax import UNITV, alpha_eq, show_term, show_type
from dcc.transform import (
    NonDccConstruct,
    NonDccdConstruct,
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
from tests.strategies import TWO, types

H, L = TWO.level("H"), TWO.level("L")


def T(src):
    return parse_type(src, TWO)


def E(src):
    return parse_term(src, TWO)


def test_weaken_translation():
    assert weaken_translate(T("T[H](unit)")) == T("W[H](unit)")
    assert weaken_translate(E("eta[H] ()")) == E("weta[H] ()")
    assert weaken_translate(UNITV) == UNITV


def test_volpano_translation_of_a_k_result():
    out = volpano_translate(E("inj2 (weta[H] ((inj1 ()) @ H))"))
    assert alpha_eq(out, E("inj2 (eta[H] (bind w = eta[H] inj1 () in w))"))
    assert volpano_translate(T("W[H](unit)")) == T("T[H](unit)")
    assert volpano_translate(UNITV) == UNITV


def test_translations_refuse_foreign_constructs():
    with pytest.raises(NonDccConstruct):
        weaken_translate(E("weta[H] ()"))
    with pytest.raises(NonDccdConstruct):
        volpano_translate(E("eta[H] ()"))


def test_erase():
    assert erase(T("(unit+unit)^H")) == T("unit+unit")
    assert erase(T("W[H]((unit+unit)^L)")) == T("W[H](unit+unit)")
    assert erase(T("unit")) == T("unit")


@pytest.mark.parametrize(
    "t, negative",
    [
        ("W[H](unit) -> (unit+unit)", True),
        ("unit -> W[H](unit)", False),
        ("(W[H](unit) -> unit) -> unit", False),
        ("(unit -> T[L](unit)) -> unit", True),
    ],
)
def test_negative_protection(t, negative):
    assert has_negative_protection(T(t)) is negative


def test_blame_of():
    assert blame_of(T("T[!H](unit+unit)"), TWO) == TWO.beta("H")
    assert blame_of(T("unit -> unit"), TWO) == TWO.bottom
    assert blame_of(T("T[!L](unit) * T[!H](unit)"), TWO) == TWO.beta("H")


def test_blame_of_ignores_levels():
    assert blame_of(T("T[H,!L](unit) * W[H](unit)"), TWO) == TWO.beta("L")


def test_leak_gen_base_cases():
    assert show_term(leak_gen(H, T("unit"), TWO), TWO) == "fun x0:W[H](unit). ()"
    pair = show_term(leak_gen(H, T("unit*unit"), TWO), TWO)
    assert "bind y1 = x0 in" in pair and "weta[H] proj1 y1" in pair and "weta[H] proj2 y1" in pair


def test_leak_of_a_boolean_checks_where_the_identity_does_not():
    env = TypingEnv(TWO, System.DCCD)
    r = check(env, leak_gen(H, T("unit+unit"), TWO))
    assert r.ok and show_type(normalize_type(r.type, TWO), TWO) == "W[H](unit + unit) -> unit + unit"
    assert not check(env, identity_leak(H, T("unit+unit"))).ok


def test_erase_taints():
    assert erase_taints(E("inj1 () @ H")) == E("inj1 ()")
    assert erase_taints(UNITV) == UNITV
    assert erase_taints(E("(inj1 () @ L) @ H")) == E("inj1 ()")


@given(types())
def test_erase_leaves_no_qualifiers(t):
    assert "^" not in show_type(erase(normalize_type(t, TWO)), TWO)


@given(types())
def test_translations_are_inverse_on_protection_only_types(t):
    t = normalize_type(t, TWO)
    if "^" in show_type(t, TWO) or "W[" in show_type(t, TWO):
        return
    assert volpano_translate(weaken_translate(t)) == t

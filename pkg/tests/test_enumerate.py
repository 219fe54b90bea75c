from __future__ import annotations

import pytest

from dcc.enumerate import (
    default_config,
    enum_closed_terms,
    enum_typed_terms,
    enum_types,
    first_order_types,
    generate_and_filter,
    leak_types,
    raw_terms,
)
from dcc.normalize import normalize_type
from dcc.parse import parse_type
from dcc.syntax import Fun, alpha_key, is_first_order, show_term, size
from dcc.typecheck import System, TypingEnv, check
from tests.strategies import TWO

SYSTEMS = ["dcc", "dccd", "dccdc", "dcccd"]


def test_enum_types_small():
    assert enum_types(1, TWO, "dcc") == [parse_type("unit", TWO)]
    two = set(enum_types(2, TWO, "dcc"))
    for src in ("unit*unit", "unit+unit", "unit->unit", "T[L](unit)", "T[H](unit)"):
        assert parse_type(src, TWO) in two


@pytest.mark.parametrize("grammar", ["dcc", "dccd", "hybrid"])
def test_enum_types_are_canonical_and_distinct(grammar):
    ts = enum_types(3, TWO, grammar)
    assert len(ts) == len(set(ts))
    assert all(normalize_type(t, TWO) == t for t in ts)


def test_grammar_controls_the_protections():
    dcc = {str(t) for t in enum_types(2, TWO, "dcc")}
    dccd = {str(t) for t in enum_types(2, TWO, "dccd")}
    assert not any("Weak" in t or "Open" in t for t in dcc)
    assert not any("Strong" in t for t in dccd)


def test_first_order_and_leak_types():
    fo = first_order_types(4, TWO, "hybrid")
    assert fo and all(is_first_order(t) and not isinstance(t, Fun) for t in fo)
    assert all(normalize_type(t, TWO) == t for t in leak_types(4, TWO))


def test_enum_typed_terms_small():
    assert [show_term(e, TWO) for e in enum_typed_terms(parse_type("unit", TWO), "dcc", 1, TWO)] == ["()"]
    bools = enum_typed_terms(parse_type("unit+unit", TWO), "dcc", 2, TWO)
    assert [show_term(e, TWO) for e in bools] == ["inj1 ()", "inj2 ()"]


def test_g_like_terms_are_enumerated():
    t = parse_type("W[H](unit+unit) -> unit+unit", TWO)
    found = [show_term(e, TWO) for e in enum_typed_terms(t, "dccd", 5, TWO)]
    # g without the case split: unwraps and returns a constant constructor
    assert "fun x0:W[H](unit + unit). bind x1 = x0 in inj1 ()" in found


@pytest.mark.parametrize("system", SYSTEMS)
def test_enumerated_terms_typecheck_at_their_type(system):
    env = TypingEnv(TWO, System(system))
    for e, t in enum_closed_terms(system, 4, TWO):
        r = check(env, e)
        assert r.ok and normalize_type(r.type, TWO) == normalize_type(t, TWO)


@pytest.mark.parametrize("system, n", [(s, 4) for s in SYSTEMS] + [("dcc", 5)])
def test_typed_enumeration_matches_generate_and_filter(system, n):
    cfg = default_config(system, TWO)
    brute = [alpha_key(e) for e, _ in generate_and_filter(n, TWO, cfg)]
    typed = [alpha_key(e) for e, _ in enum_closed_terms(system, n, TWO, cfg)]
    assert len(typed) == len(set(typed))
    assert set(typed) == set(brute)


def test_enumeration_is_deterministic():
    cfg = default_config("dccd", TWO)
    first = [show_term(e, TWO) for e, _ in enum_closed_terms("dccd", 4, TWO, cfg)]
    assert first == [show_term(e, TWO) for e, _ in enum_closed_terms("dccd", 4, TWO, cfg)]


def test_raw_terms_have_the_requested_size():
    cfg = default_config("dcc", TWO)
    assert all(size(e) == 3 for e in raw_terms(3, TWO, cfg))


def test_weaken_can_be_switched_off():
    from dataclasses import replace

    cfg = replace(default_config("dccdc", TWO), weaken=False)
    assert not any("weaken" in show_term(e, TWO) for e, _ in enum_closed_terms("dccdc", 4, TWO, cfg))
    assert any("weaken" in show_term(e, TWO) for e, _ in enum_closed_terms("dccdc", 4, TWO))

from __future__ import annotations

import pytest
from hypothesis import given

from dcc.normalize import normalize_type
from dcc.parse import parse_type
from dcc.protect import protected_at, weakly_protected_at
from dcc.transform import erase
from tests.strategies import LEVELS, TWO, types

H = TWO.level("H")


@pytest.mark.parametrize(
    "text, strong, weak",
    [
        ("T[H](unit+unit)", True, True),
        ("unit+unit", False, True),
        ("unit -> T[H](unit)", True, True),
        ("(unit+unit)^H", False, False),
        ("unit", True, True),
        ("T[L](unit+unit)", False, True),
        ("W[H](unit+unit)", False, True),
        ("T[H](unit) * (unit+unit)", False, True),
        ("W[L]((unit+unit)^H)", False, False),
    ],
)
def test_protection_predicates(text, strong, weak):
    t = normalize_type(parse_type(text, TWO), TWO)
    assert protected_at(H, t, TWO) is strong
    assert weakly_protected_at(H, t, TWO) is weak


@given(types(), LEVELS)
def test_erased_types_are_weakly_protected_everywhere(t, l):
    assert weakly_protected_at(l, erase(normalize_type(t, TWO)), TWO)


@given(types(), LEVELS, LEVELS)
def test_protection_is_downward_closed(t, l, m):
    t = normalize_type(t, TWO)
    if TWO.leq(m, l):
        for pred in (protected_at, weakly_protected_at):
            if pred(l, t, TWO):
                assert pred(m, t, TWO)


@given(types(), LEVELS)
def test_strong_protection_implies_weak(t, l):
    t = normalize_type(t, TWO)
    if protected_at(l, t, TWO):
        assert weakly_protected_at(l, t, TWO)

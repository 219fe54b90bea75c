from __future__ import annotations

import pytest

from dcc.corpus import CORPUS, lookup, program_term, run_case, run_corpus
from dcc.lattice import make_indices
from dcc.typecheck import check, TypingEnv

CASES = [(p, e) for p in CORPUS for e in p.cases]
# the stated type of the blame program disagrees with the weaken rule (see the decisions ledger)
KNOWN_RED = {("blame", "dccdc")}


def case_id(pe):
    p, e = pe
    return f"{p.name}-{e.system.value}"


@pytest.mark.parametrize("case", CASES, ids=[case_id(c) for c in CASES])
def test_recorded_verdict(case):
    p, e = case
    r = run_case(p, e)
    if (p.name, e.system.value) in KNOWN_RED:
        assert not r.passed
        assert r.detail == "type T[!H](W[H](unit + unit)), expected T[!H](unit + unit)"
    else:
        assert r.passed, r.detail


def test_corpus_names_are_unique():
    names = [p.name for p in CORPUS]
    assert len(names) == len(set(names))
    assert lookup("switch").name == "switch"
    with pytest.raises(KeyError):
        lookup("nope")


def test_switch_inlined_is_rejected_in_dcccd():
    # bind lowers the open context, so `not` cannot branch once substituted in
    e = lookup("switch").cases[1]
    lat = make_indices("two")
    assert not check(TypingEnv(lat, e.system), program_term(e, lat, inline=True)).ok


def test_run_corpus_covers_every_case():
    results = run_corpus()
    assert len(results) == len(CASES)
    assert {(r.program.name, r.expectation.system.value) for r in results if not r.passed} == KNOWN_RED

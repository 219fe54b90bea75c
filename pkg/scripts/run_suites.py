"""Run theorem and property suites and save their reports as JSON.

    python scripts/run_suites.py --size 6 T1 T2 T3
    python scripts/run_suites.py --size 9 --budget 600 --out results/stated.json
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from dcc.theorems import SUITES, Bounds, BoundsTooLarge, run_theorem_suite


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("suites", nargs="*", default=list(SUITES), help="suite ids (default: all)")
    ap.add_argument("--size", type=int, default=Bounds.size)
    ap.add_argument("--lattice", default=Bounds.lattice)
    ap.add_argument("--budget", type=float, default=Bounds.budget, help="seconds per suite")
    ap.add_argument("--depth", type=int, default=Bounds.value_depth)
    ap.add_argument("--keep-going", action="store_true", help="collect every counterexample")
    ap.add_argument("--out", type=Path, help="write the reports here as a JSON list")
    args = ap.parse_args(argv)

    bounds = Bounds(
        size=args.size,
        lattice=args.lattice,
        value_depth=args.depth,
        budget=args.budget,
        fail_fast=not args.keep_going,
    )
    reports = []
    all_ok = True
    for suite in args.suites:
        t0 = time.perf_counter()
        status = ""
        try:
            report = run_theorem_suite(suite, bounds)
        except BoundsTooLarge as err:
            report, status = err.report, f" bounds too large: {err}"
        data = report.to_json()
        data["bounds_too_large"] = bool(status)
        reports.append(data)
        all_ok &= report.ok
        print(
            f"{suite:7} {'PASS' if report.ok else 'FAIL'} size<={report.completed_size} "
            f"instances={report.instances} counterexamples={len(report.counterexamples)} "
            f"{time.perf_counter() - t0:.1f}s{status}",
            flush=True,
        )
        for c in report.counterexamples[:5]:
            print(f"    {c.term}  [{c.levels}]  {c.verdict}", flush=True)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(reports, indent=2) + "\n")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())

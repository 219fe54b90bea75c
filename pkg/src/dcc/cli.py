"""Command-line front end.

Exit status: 0 for success or a positive verdict, 1 for a well-formed
negative verdict (ill-typed, distinguishable, unsafe, corpus mismatch),
2 for usage, parse and configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from dcc.corpus import CORPUS, run_corpus
from dcc.evaluate import DEFAULT_FUEL, EvalError, evaluate
from dcc.lattice import IndexLattice, LatticeError, make_indices
from dcc.normalize import normalize_type
from dcc.oracles import OracleConfig, OracleError, indistinguishable, safe
from dcc.parse import ParseError, parse_term, parse_type
from dcc.syntax import Span, Term, Type, show_term, show_type
from dcc.theorems import SCHEMA
from dcc.transform import TransformError, blame_of, leak_gen, volpano_translate, weaken_translate
from dcc.typecheck import CheckError, CheckReport, SideConditionFailed, System, TypingEnv, check

OK, NEGATIVE, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class Output:
    def __init__(self, command: str, as_json: bool):
        self.command = command
        self.as_json = as_json
        self.data: dict[str, Any] = {"schema": SCHEMA, "command": command}

    def line(self, text: str) -> None:
        if not self.as_json:
            print(text)

    def flush(self) -> None:
        if self.as_json:
            print(json.dumps(self.data, indent=2, ensure_ascii=False))


# ------------------------------------------------------------ argument parsing


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lattice", default="two", help="built-in name (two, diamond, three) or lattice file")
    common.add_argument("--blame-order", choices=("preserve", "flip"), default="preserve")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("file", nargs="?", help="program file")
    source.add_argument("-e", dest="expr", help="program text")

    ap = argparse.ArgumentParser(prog="dcc", description="Typechecker and toolkit for the DCC family of calculi.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common, source], help="typecheck a program")
    p.add_argument("--system", choices=[s.value for s in System], default="dcc")
    p.add_argument("--trace", action="store_true", help="print the derivation")

    p = sub.add_parser("eval", parents=[common, source], help="evaluate a program")
    p.add_argument("--taint", action="store_true", help="propagate taints")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)

    for name, help_ in (("equiv", "decide indistinguishability"), ("safe", "decide safety")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--level", required=True)
        p.add_argument("--type", required=True)
        p.add_argument("--depth", type=int, default=OracleConfig.depth)
        p.add_argument("terms", nargs=2 if name == "equiv" else 1, metavar="E")

    p = sub.add_parser("translate", parents=[common, source], help="translate between DCC and DCC^d")
    p.add_argument("--dir", required=True, choices=("dcc-to-dccd", "dccd-to-dcc"))
    p.add_argument("-t", dest="type", help="translate this type instead of a term")

    p = sub.add_parser("blame", parents=[common], help="blame carried by a type")
    p.add_argument("-t", dest="type", required=True)

    p = sub.add_parser("leak", parents=[common], help="generate the leak term for a type")
    p.add_argument("--level", required=True)
    p.add_argument("--type", required=True)

    p = sub.add_parser("corpus", parents=[common], help="the named example programs")
    p.add_argument("action", choices=("list", "run"))
    p.add_argument("names", nargs="*")
    return ap


def _lattice(args: argparse.Namespace) -> IndexLattice:
    return make_indices(args.lattice, args.blame_order)


def _program_text(args: argparse.Namespace) -> str:
    if (args.expr is None) == (args.file is None):
        raise UsageError("give exactly one of FILE or -e EXPR")
    if args.expr is not None:
        return args.expr
    return Path(args.file).read_text(encoding="utf-8")


def _span(span: Optional[Span]) -> Optional[list[int]]:
    return None if span is None else [span.start, span.end]


# ------------------------------------------------------------ commands


def _failure_text(err: CheckError) -> str:
    if isinstance(err, SideConditionFailed):
        return f"{err.rule} side condition failed: {err.condition}"
    return str(err)


def cmd_check(args: argparse.Namespace, out: Output) -> int:
    lat = _lattice(args)
    term = parse_term(_program_text(args), lat)
    report: CheckReport = check(TypingEnv(lat, System(args.system)), term, trace=args.trace)
    out.data["system"] = args.system
    if args.trace:
        out.data["trace"] = [{"depth": s.depth, "rule": s.rule, "judgment": s.judgment} for s in report.trace]
        for s in report.trace:
            out.line(f"{'  ' * s.depth}{s.rule}  {s.judgment}")
    for note in report.notes:
        out.line(f"note: {note}")
    out.data["notes"] = list(report.notes)
    if report.ok:
        t = normalize_type(report.type, lat)  # type: ignore[arg-type]
        out.data.update(verdict="well-typed", type=show_type(t, lat))
        out.line(show_type(t, lat))
        return OK
    err = report.error
    assert err is not None
    out.data.update(
        verdict="ill-typed",
        error={"rule": err.rule, "message": err.message, "span": _span(err.span)},
    )
    where = f" at bytes {err.span.start}-{err.span.end}" if err.span else ""
    out.line(f"ill-typed: {_failure_text(err)}{where}")
    return NEGATIVE


def cmd_eval(args: argparse.Namespace, out: Output) -> int:
    lat = _lattice(args)
    term = parse_term(_program_text(args), lat)
    try:
        v = evaluate(term, lat, taint=args.taint, fuel=args.fuel)
    except EvalError as err:
        out.data.update(verdict="stuck", error={"message": str(err)})
        out.line(f"evaluation failed: {err}")
        return NEGATIVE
    out.data.update(verdict="value", value=show_term(v, lat))
    out.line(show_term(v, lat))
    return OK


def _oracle_inputs(args: argparse.Namespace) -> tuple[IndexLattice, Type, list[Term], OracleConfig]:
    lat = _lattice(args)
    level = lat.parse(args.level)
    args.level_index = level
    t = parse_type(args.type, lat)
    terms = [parse_term(src, lat) for src in args.terms]
    return lat, t, terms, OracleConfig(depth=args.depth)


def cmd_equiv(args: argparse.Namespace, out: Output) -> int:
    lat, t, (e1, e2), cfg = _oracle_inputs(args)
    verdict = indistinguishable(e1, e2, t, args.level_index, lat, cfg)
    out.data.update(verdict=verdict, level=lat.show(args.level_index), type=show_type(normalize_type(t, lat), lat))
    out.line("true" if verdict else "false")
    return OK if verdict else NEGATIVE


def cmd_safe(args: argparse.Namespace, out: Output) -> int:
    lat, t, (e,), cfg = _oracle_inputs(args)
    verdict = safe(e, t, args.level_index, lat, cfg)
    out.data.update(verdict=verdict, level=lat.show(args.level_index), type=show_type(normalize_type(t, lat), lat))
    out.line("true" if verdict else "false")
    return OK if verdict else NEGATIVE


def cmd_translate(args: argparse.Namespace, out: Output) -> int:
    lat = _lattice(args)
    fn = weaken_translate if args.dir == "dcc-to-dccd" else volpano_translate
    if args.type is not None:
        if args.expr is not None or args.file is not None:
            raise UsageError("give either -t TYPE or a program, not both")
        result = show_type(fn(parse_type(args.type, lat)), lat)
        out.data["kind"] = "type"
    else:
        result = show_term(fn(parse_term(_program_text(args), lat)), lat)
        out.data["kind"] = "term"
    out.data.update(direction=args.dir, result=result)
    out.line(result)
    return OK


def cmd_blame(args: argparse.Namespace, out: Output) -> int:
    lat = _lattice(args)
    b = blame_of(parse_type(args.type, lat), lat)
    level = lat.beta_inv(b)
    out.data.update(blame=lat.show(b), level=lat.show(level))
    out.line(f"{lat.show(b)} (level {lat.show(level)})")
    return OK


def cmd_leak(args: argparse.Namespace, out: Output) -> int:
    lat = _lattice(args)
    level = lat.parse(args.level)
    term = leak_gen(level, parse_type(args.type, lat), lat)
    out.data.update(term=show_term(term, lat))
    out.line(show_term(term, lat))
    return OK


def cmd_corpus(args: argparse.Namespace, out: Output) -> int:
    known = {p.name for p in CORPUS}
    unknown = [n for n in args.names if n not in known]
    if unknown:
        raise UsageError(f"unknown program(s): {', '.join(unknown)}")
    chosen = [p for p in CORPUS if not args.names or p.name in args.names]
    if args.action == "list":
        out.data["programs"] = [
            {
                "name": p.name,
                "summary": p.summary,
                "cases": [
                    {"system": c.system.value, "source": c.source, "accepted": c.accepted, "type": c.type}
                    for c in p.cases
                ],
            }
            for p in chosen
        ]
        for p in chosen:
            systems = ", ".join(f"{c.system.value}:{'accept' if c.accepted else 'reject'}" for c in p.cases)
            out.line(f"{p.name:12} {systems:36} {p.summary}")
        return OK
    results = run_corpus([p.name for p in chosen])
    rows = []
    for r in results:
        lat = make_indices(r.program.lattice, r.program.blame_order)
        got = r.report.describe(lat)
        rows.append(
            {
                "name": r.program.name,
                "system": r.expectation.system.value,
                "expected": "accept" if r.expectation.accepted else "reject",
                "passed": r.passed,
                "result": got,
                "detail": r.detail,
            }
        )
        status = "PASS" if r.passed else "FAIL"
        extra = f"  ({r.detail})" if r.detail else ""
        out.line(f"{status} {r.program.name:12} {r.expectation.system.value:6} {got}{extra}")
    failed = sum(not r.passed for r in results)
    out.data.update(results=rows, passed=len(results) - failed, failed=failed)
    out.line(f"{len(results) - failed}/{len(results)} verdicts as expected")
    return OK if failed == 0 else NEGATIVE


COMMANDS = {
    "check": cmd_check,
    "eval": cmd_eval,
    "equiv": cmd_equiv,
    "safe": cmd_safe,
    "translate": cmd_translate,
    "blame": cmd_blame,
    "leak": cmd_leak,
    "corpus": cmd_corpus,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return ERROR if exc.code not in (0, None) else OK
    out = Output(args.command, args.json)
    try:
        code = COMMANDS[args.command](args, out)
    except ParseError as err:
        out.data.update(verdict="error", error={"kind": "parse", "message": err.message, "span": _span(err.span)})
        _report_error(out, f"parse error at bytes {err.span.start}-{err.span.end}: {err.message}")
        code = ERROR
    except (UsageError, LatticeError, OracleError, TransformError, OSError, CheckError) as err:
        out.data.update(verdict="error", error={"kind": type(err).__name__, "message": str(err)})
        _report_error(out, f"error: {err}")
        code = ERROR
    out.data["exit"] = code
    out.flush()
    return code


def _report_error(out: Output, text: str) -> None:
    if not out.as_json:
        print(text, file=sys.stderr)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command line front end.

Subcommands map one-to-one onto the library: `gamma` and `dgamma` evaluate
single expressions, `gct compile` and `gct matrix` work on contact
notation, `tabulate` runs the census, `verify` runs the move suite, and
`random` draws a diagram.  Output is deterministic for a fixed argument
list, whatever the parallelism; exit codes are 0 success, 1 computation
error, 2 usage error, 3 failed verification.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import gct
from . import tangle as tg
from . import verify as vfy
from .dgamma import dgamma1, eval_dgamma
from .gamma import GammaError, eval_gamma
from .symcalc import (SymcalcError, poly_latex, poly_text, ratfun_latex,
                      ratfun_text)

_FORMATS = ("text", "json", "csv", "md", "latex")


def _add_format(p, choices=_FORMATS):
    p.add_argument("--format", choices=choices, default="text",
                   help="output format (default text)")


def _add_inputs(p, gct_ok: bool):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--expr", help="tangle expression text")
    if gct_ok:
        g.add_argument("--gct", help="contact-pair notation text")
    g.add_argument("--file", help="read the input from a file")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ctkit",
        description="Exact invariants of tangles and folded chains.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", help="evaluate the single-copy state")
    _add_inputs(p, gct_ok=False)
    _add_format(p, ("text", "json", "latex"))
    p.set_defaults(handler=_cmd_gamma)

    p = sub.add_parser("dgamma",
                       help="evaluate the doubled-strand invariant")
    _add_inputs(p, gct_ok=True)
    _add_format(p, ("text", "json", "latex"))
    p.add_argument("--with-matrix", action="store_true",
                   help="also print the doubled state")
    p.set_defaults(handler=_cmd_dgamma)

    p = sub.add_parser("gct", help="contact-diagram tools")
    gsub = p.add_subparsers(dest="gct_command", required=True)

    c = gsub.add_parser("compile", help="translate notation to a tangle")
    _c_group = c.add_mutually_exclusive_group(required=True)
    _c_group.add_argument("--gct", help="contact-pair notation text")
    _c_group.add_argument("--file", help="read the notation from a file")
    c.add_argument("--frame-zero", action="store_true",
                   help="cancel piece writhes with compensating twists")
    c.add_argument("--emit-dsl", action="store_true",
                   help="print only the compiled expression")
    _add_format(c, ("text", "json"))
    c.set_defaults(handler=_cmd_compile)

    c = gsub.add_parser("matrix", help="pairwise contact relations")
    _m_group = c.add_mutually_exclusive_group(required=True)
    _m_group.add_argument("--gct", help="contact-pair notation text")
    _m_group.add_argument("--file", help="read the notation from a file")
    _add_format(c)
    c.set_defaults(handler=_cmd_matrix)

    p = sub.add_parser("tabulate", help="census of n-contact chains")
    p.add_argument("-n", type=int, required=True, choices=(1, 2, 3),
                   help="number of contacts (1 to 3)")
    p.add_argument("--drop-loose-clasps", action="store_true",
                   help="skip diagrams with a directly clasped pair")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default CTKIT_JOBS or 1)")
    _add_format(p)
    p.set_defaults(handler=_cmd_tabulate)

    p = sub.add_parser("verify", help="run the move suite")
    p.add_argument("--engine", choices=("gamma", "dgamma"),
                   help="restrict to one engine (default both)")
    p.add_argument("--move", help="restrict to one named move")
    _add_format(p, ("text", "json"))
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("random", help="draw a random diagram")
    p.add_argument("-n", type=int, required=True,
                   help="number of contacts")
    p.add_argument("--seed", type=int, default=0,
                   help="random seed (default 0)")
    _add_format(p, ("text", "json"))
    p.set_defaults(handler=_cmd_random)
    return top


def _read_file(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read().strip()


def _dsl_input(args, parser) -> str:
    if args.file is not None:
        return _read_file(args.file)
    return args.expr


def _dgamma_input(args, parser) -> tuple[str, str]:
    """Resolve dgamma input to ("expr" | "gct", text)."""
    if args.expr is not None:
        return "expr", args.expr
    if getattr(args, "gct", None) is not None:
        return "gct", args.gct
    text = _read_file(args.file)
    # contact notation is the only input form that starts with a brace
    return ("gct" if text.lstrip().startswith("{") else "expr"), text


def _gct_input(args, parser) -> str:
    if args.file is not None:
        return _read_file(args.file)
    return args.gct


def _unit_text(sign: int, exponent: int) -> str:
    return f"{'+' if sign > 0 else '-'}t^{exponent}"


def _state_lines(state) -> list[str]:
    lines = [f"omega = {ratfun_text(state.omega)}"]
    for key in sorted(state.matrix):
        i, j = key
        lines.append(f"r{i}c{j} = {ratfun_text(state.matrix[key])}")
    return lines


def _state_dict(state) -> dict:
    return {"omega": ratfun_text(state.omega),
            "matrix": {f"{i},{j}": ratfun_text(v)
                       for (i, j), v in sorted(state.matrix.items())},
            "strands": sorted(state.labels)}


def _cmd_gamma(args, parser) -> int:
    state = eval_gamma(_dsl_input(args, parser))
    if args.format == "json":
        print(json.dumps(_state_dict(state)))
    elif args.format == "latex":
        print(ratfun_latex(state.omega))
    else:
        print("\n".join(_state_lines(state)))
    return 0


def _cmd_dgamma(args, parser) -> int:
    kind, text = _dgamma_input(args, parser)
    if kind == "gct":
        # the invariant of a diagram is taken at zero framing
        expr = gct.compile_diagram(gct.parse_gct(text), frame_zero=True).expr
    else:
        expr = tg.parse_expr(text)
    report = dgamma1(expr)
    if args.format == "latex":
        print(poly_latex(report.value))
        return 0
    if args.format == "json":
        out = {"value": report.text(), "latex": poly_latex(report.value),
               "degree": report.value.total_degree(),
               "unit": {"sign": report.unit_sign,
                        "exponent": report.unit_exponent},
               "contacts": {v: k for k, v in report.h_map.items()}}
        if args.with_matrix:
            out["state"] = _state_dict(eval_dgamma(expr))
        print(json.dumps(out))
        return 0
    print(f"value = {report.text()}")
    print(f"unit = {_unit_text(report.unit_sign, report.unit_exponent)}")
    for name, sym in report.h_map.items():
        print(f"{sym} = contact {name}")
    if args.with_matrix:
        print("\n".join(_state_lines(eval_dgamma(expr))))
    return 0


def _cmd_compile(args, parser) -> int:
    d = gct.parse_gct(_gct_input(args, parser))
    compiled = gct.compile_diagram(d, frame_zero=args.frame_zero)
    if args.emit_dsl:
        print(compiled.dsl)
        return 0
    geo = compiled.geometry
    if args.format == "json":
        print(json.dumps({
            "notation": compiled.diagram.text(),
            "dsl": compiled.dsl,
            "frame_corrected": compiled.frame_corrected,
            "crossings": geo.crossing_count,
            "piece_writhes": [list(pw) for pw in geo.piece_writhes],
        }))
        return 0
    print(f"notation = {compiled.diagram.text()}")
    print(f"dsl = {compiled.dsl}")
    print(f"crossings = {geo.crossing_count}")
    writhes = " ".join(f"{p}:{w:+d}" for p, w in geo.piece_writhes)
    print(f"piece writhes = {writhes}")
    return 0


def _cmd_matrix(args, parser) -> int:
    d = gct.parse_gct(_gct_input(args, parser))
    mat = gct.relation_matrix(d)
    names = [c.text() for c in d.contacts]
    if args.format == "json":
        print(json.dumps({"contacts": names, "matrix": mat}))
    elif args.format == "csv":
        print(",".join([""] + names))
        for name, row in zip(names, mat):
            print(",".join([name] + row))
    elif args.format == "md":
        print("| | " + " | ".join(names) + " |")
        print("|" + "---|" * (len(names) + 1))
        for name, row in zip(names, mat):
            print("| " + " | ".join([name] + row) + " |")
    elif args.format == "latex":
        print(r"\begin{tabular}{l" + "c" * len(names) + "}")
        print(" & " + " & ".join(names) + r" \\")
        for name, row in zip(names, mat):
            print(name + " & " + " & ".join(row) + r" \\")
        print(r"\end{tabular}")
    else:
        width = max(len(n) for n in names)
        print(" " * (width + 1) + " ".join(f"{n:>{width}}" for n in names))
        for name, row in zip(names, mat):
            print(f"{name:>{width}} " +
                  " ".join(f"{v:>{width}}" for v in row))
    return 0


def _cmd_tabulate(args, parser) -> int:
    rows = gct.census(args.n, drop_loose_clasps=args.drop_loose_clasps,
                      jobs=args.jobs)
    fmt = "md" if args.format == "text" else args.format
    print(gct.render_census(rows, fmt))
    return 0


def _cmd_verify(args, parser) -> int:
    engines = (args.engine,) if args.engine else ("gamma", "dgamma")
    reports = []
    for engine in engines:
        moves = vfy.builtin_moves(engine)
        if args.move is not None:
            moves = [m for m in moves if m.name == args.move]
        reports.extend((engine, vfy.check_move(m, engine)) for m in moves)
    if args.move is not None and not reports:
        parser.error(f"no built-in move named {args.move!r}")

    naive = None
    if args.move is None and "gamma" in engines:
        naive = vfy.naive_h_constraints()

    passed = (all(r.passed for _, r in reports)
              and (naive is None or naive.ok))
    if args.format == "json":
        print(json.dumps({
            "moves": [r.to_dict() for _, r in reports],
            "naive_extension": None if naive is None else naive.to_dict(),
            "passed": passed,
        }))
        return 0 if passed else 3

    for engine, r in reports:
        status = ("INFO" if r.expected == "record"
                  else "PASS" if r.passed else "FAIL")
        line = f"{status} {engine:6} {r.move:13} {r.outcome}"
        if r.ratio is not None:
            line += f" ratio={r.ratio}"
        print(line)
        for key, left, right in r.matrix_diff:
            print(f"       r{key.replace(',', 'c', 1)}: {left} vs {right}")
        if r.error:
            print(f"       {r.error}")
    if naive is not None:
        rel = "; ".join(f"{k} = {v}" for k, v in naive.relations.items())
        state = "PASS" if naive.ok else "FAIL"
        print(f"{state} naive contact rule: {rel} "
              f"({', '.join(naive.free)} free)")
        print(f"     pinched loop omega = {naive.pinched_omega}; "
              f"series/parallel blind = {naive.sp_blind}")
    print(f"result: {'PASS' if passed else 'FAIL'} "
          f"({len(reports)} move checks)")
    return 0 if passed else 3


def _cmd_random(args, parser) -> int:
    if args.n < 1:
        parser.error("-n must be at least 1")
    d = gct.random_diagram(args.n, args.seed)
    if args.format == "json":
        print(gct.diagram_to_json(d))
    else:
        print(d.text())
    return 0


_FAILURES = (tg.TangleError, GammaError, SymcalcError, gct.GctError,
             vfy.VerifyError, OSError, ValueError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except _FAILURES as exc:
        print(f"ctkit: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

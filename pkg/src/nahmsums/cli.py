"""Command-line interface: ``nahm <command> ...``.

Every command prints one JSON document (or writes it to ``--output``).  The
exit status is 0 when all checks of the command pass, 1 when a check fails
and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .asymptotics import expansion
from .errors import NahmError
from .expr import evaluate
from .numerics import DEFAULT_PREC
from .qseries import verify_identity
from .screening import (
    HOLDS,
    RunConfig,
    bloch_audit,
    decimal,
    reproduce_tables,
    screen_triple,
    search_B_C,
)
from .system import NahmTriple, format_rational, load_matrix, parse_rational, solve_positive
from .tables import TABLE_IDS


def _config(args) -> RunConfig:
    return RunConfig.from_env(
        prec=getattr(args, "prec", None),
        P=getattr(args, "P", None),
        order=getattr(args, "order", None),
        max_den=getattr(args, "max_den", None),
        output=getattr(args, "output", None),
        threads=getattr(args, "threads", None),
    )


def _cmd_solve(args) -> tuple[dict, bool]:
    cfg = _config(args)
    A = load_matrix(args.matrix)
    sol = solve_positive(A, cfg.prec)
    return {
        "command": "solve",
        "precision_bits": cfg.prec,
        "A": [[format_rational(v) for v in row] for row in A],
        "Q": [decimal(q, cfg.prec) for q in sol.Q],
        "xi": [decimal(x, cfg.prec) for x in sol.xi],
        "residual": decimal(sol.residual, 32),
        "iterations": sol.iterations,
    }, True


def _cmd_asym(args) -> tuple[dict, bool]:
    cfg = _config(args)
    triple = NahmTriple.load(args.triple)
    exp = expansion(triple, cfg.P, cfg.prec)
    p = cfg.prec
    return {
        "command": "asym",
        "precision_bits": p,
        "triple": triple.to_json(),
        "alpha": decimal(exp.alpha, p),
        "beta": decimal(exp.beta, p),
        "gamma": decimal(exp.gamma, p),
        "c": [decimal(c, p) for c in exp.c],
        "Q": [decimal(q, p) for q in exp.solution.Q],
        "det_Atilde": decimal(exp.det_Atilde, p),
    }, True


def _screen_one(path: str, cfg: RunConfig) -> dict:
    return screen_triple(NahmTriple.load(path), cfg).to_json()


def _cmd_screen(args) -> tuple[dict, bool]:
    cfg = _config(args)
    if cfg.threads > 1 and len(args.triple) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            reports = list(pool.map(_screen_one, args.triple, [cfg] * len(args.triple)))
    else:
        reports = [_screen_one(t, cfg) for t in args.triple]
    ok = all(r["verdict"] == "Candidate" for r in reports)
    return {"command": "screen", "reports": reports}, ok


def _cmd_search(args) -> tuple[dict, bool]:
    cfg = _config(args)
    A = load_matrix(args.matrix)
    found = search_B_C(A, cfg)
    return {
        "command": "search",
        "A": [[format_rational(v) for v in row] for row in A],
        "candidates": [
            {"B": [format_rational(b) for b in B], "C": format_rational(C), "report": rep.to_json()}
            for B, C, rep in found
        ],
    }, True


def _cmd_bloch(args) -> tuple[dict, bool]:
    cfg = _config(args)
    if args.matrix:
        audit = bloch_audit(config=cfg, A=load_matrix(args.matrix))
    else:
        param = parse_rational(args.param) if args.param is not None else None
        audit = bloch_audit(args.family, param, cfg)
    out = audit.to_json()
    out["command"] = "bloch"
    return out, audit.condition_i == HOLDS


def _cmd_tables(args) -> tuple[dict, bool]:
    cfg = _config(args)
    which = list(TABLE_IDS) if args.which.lower() == "all" else [args.which]
    results = reproduce_tables(which, cfg, csv_path=args.csv)
    rows = [r.to_json() for r in results]
    passed = sum(r.passed for r in results)
    return {
        "command": "tables",
        "order": cfg.order,
        "passed": passed,
        "total": len(results),
        "rows": rows,
    }, passed == len(results)


def _cmd_verify(args) -> tuple[dict, bool]:
    order = parse_rational(args.order)
    base = Path.cwd()
    lhs = evaluate(args.lhs, order, base)
    rhs = evaluate(args.rhs, order, base)
    verdict = verify_identity(lhs, rhs)
    out = {"command": "verify", "lhs": args.lhs, "rhs": args.rhs, "order": format_rational(order)}
    out.update(verdict.to_json())
    return out, verdict.matched


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nahm", description="Nahm sums: solving, asymptotics, screening and q-series checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, prec=True):
        if prec:
            p.add_argument("--prec", type=int, default=None,
                           help=f"working precision in bits (default {DEFAULT_PREC}, or $NAHM_PREC)")
        p.add_argument("--output", "-o", default=None, help="write the JSON report here instead of stdout")
        p.add_argument("--threads", type=int, default=None, help="worker processes for batch work")

    p = sub.add_parser("solve", help="positive solution of Nahm's equations")
    p.add_argument("--matrix", required=True, help="JSON file with the matrix A")
    common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("asym", help="asymptotic expansion data alpha, beta, gamma, c_p")
    p.add_argument("--triple", required=True)
    p.add_argument("-P", dest="P", type=int, default=None, help="number of c_p (default 6)")
    common(p)
    p.set_defaults(func=_cmd_asym)

    p = sub.add_parser("screen", help="modularity screen of one or more triples")
    p.add_argument("--triple", required=True, action="append")
    p.add_argument("-P", dest="P", type=int, default=None)
    p.add_argument("--max-den", dest="max_den", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_screen)

    p = sub.add_parser("search", help="search B and C for a matrix A")
    p.add_argument("--matrix", required=True)
    p.add_argument("-P", dest="P", type=int, default=None)
    p.add_argument("--max-den", dest="max_den", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("bloch", help="Bloch-Wigner audit over catalog solution sets")
    p.add_argument("--family", default=None, help="off-diag-half | off-diag-two | off-diag-one | integer-4x4")
    p.add_argument("--param", default=None, help="family parameter a as p/q")
    p.add_argument("--matrix", default=None, help="alternatively a matrix belonging to a family")
    common(p)
    p.set_defaults(func=_cmd_bloch)

    p = sub.add_parser("tables", help="reproduce catalog tables (screen + identity check)")
    p.add_argument("--which", default="all", help=f"{' | '.join(TABLE_IDS)} | all (case-insensitive)")
    p.add_argument("--order", type=int, default=None, help="series order (default 40)")
    p.add_argument("-P", dest="P", type=int, default=None)
    p.add_argument("--csv", default=None, help="also write a CSV summary")
    common(p)
    p.set_defaults(func=_cmd_tables)

    p = sub.add_parser("verify", help="compare two q-series expressions exactly")
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--order", required=True)
    common(p, prec=False)
    p.set_defaults(func=_cmd_verify)
    return parser


def _emit(report: dict, output: str | None) -> None:
    text = json.dumps(report, indent=2)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bloch" and not args.matrix and not args.family:
        parser.error("bloch needs --family or --matrix")
    try:
        report, ok = args.func(args)
    except (NahmError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(report, args.output)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command line front end.

::

    confalg verify (--all | --id ID) [--algebra NAME] [--tag TAG] [--format text|json]
    confalg comm EXPR_A EXPR_B --algebra NAME
    confalg normalize EXPR --algebra NAME
    confalg repcheck [--dim N] [--photons N] [--grid M] [--seed S] [--hbar X]
    confalg report --out PATH

Exit status: 0 when everything passes, 1 on any FAIL or INCONCLUSIVE,
2 on usage or configuration errors.  ``CONFALG_DIM``, ``CONFALG_PHOTONS``,
``CONFALG_GRID`` and ``CONFALG_SEED`` set numeric defaults; flags win.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algebras import ALGEBRA_NAMES, make_algebra
from .catalog import (
    REPORT_SCHEMA,
    report_text,
    report_to_json,
    shipped_catalog,
    verify_all,
)
from .fockrep import NumericConfig, run_numerical_suite
from .ncalg import RejectedInput, commutator, normalize
from .parser import format_expr, parse_expr

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="confalg", description="Symbolic and numerical checks of conformal operator identities.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run catalog records")
    sel = v.add_mutually_exclusive_group(required=True)
    sel.add_argument("--all", action="store_true", help="every record (optionally filtered)")
    sel.add_argument("--id", help="a single record id")
    v.add_argument("--algebra", choices=ALGEBRA_NAMES)
    v.add_argument("--tag")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--skip-numerical", action="store_true", help="mark numerical-only records SKIPPED")
    v.add_argument("--timing", action="store_true", help="include wall times in JSON output")

    c = sub.add_parser("comm", help="print the normal-ordered bracket (A, B)")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--algebra", choices=ALGEBRA_NAMES, required=True)

    n = sub.add_parser("normalize", help="print the normal form of an expression")
    n.add_argument("expr")
    n.add_argument("--algebra", choices=ALGEBRA_NAMES, required=True)

    r = sub.add_parser("repcheck", help="run the numerical suite")
    r.add_argument("--dim", type=int)
    r.add_argument("--photons", type=int)
    r.add_argument("--grid", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--hbar", type=_positive_float)
    r.add_argument("--format", choices=("text", "json"), default="text")

    o = sub.add_parser("report", help="write the symbolic and numerical reports as one JSON file")
    o.add_argument("--out", required=True)
    o.add_argument("--timing", action="store_true")
    return p


def _config(args=None) -> NumericConfig:
    over = {}
    if args is not None:
        over = {k: getattr(args, k, None) for k in ("dim", "photons", "grid", "seed", "hbar")}
    return NumericConfig.from_env(**over)


def _emit(report: dict, fmt: str, out, timing: bool = False) -> int:
    if fmt == "json":
        out.write(report_to_json(report, timing))
    else:
        out.write(report_text(report))
    return EXIT_OK if report["summary"]["status"] == "PASS" else EXIT_FAIL


def cmd_verify(args, out) -> int:
    ids = None
    if args.id is not None:
        known = {r.id for r in shipped_catalog()}
        if args.id not in known:
            raise UsageError(f"unknown record id {args.id!r}")
        ids = {args.id}
    numerical = False if args.skip_numerical else _config()
    report = verify_all(algebra=args.algebra, tag=args.tag, ids=ids, numerical=numerical)
    if not report["entries"]:
        raise UsageError("no record matches the selection")
    return _emit(report, args.format, out, args.timing)


def cmd_comm(args, out) -> int:
    alg = make_algebra(args.algebra)
    a = parse_expr(args.a, alg)
    b = parse_expr(args.b, alg)
    out.write(format_expr(commutator(a, b, alg)) + "\n")
    return EXIT_OK


def cmd_normalize(args, out) -> int:
    alg = make_algebra(args.algebra)
    out.write(format_expr(normalize(parse_expr(args.expr, alg), alg)) + "\n")
    return EXIT_OK


def cmd_repcheck(args, out) -> int:
    return _emit(run_numerical_suite(_config(args)), args.format, out)


def cmd_report(args, out) -> int:
    config = _config()
    sym = verify_all(numerical=config)
    num = run_numerical_suite(config)
    ok = sym["summary"]["status"] == "PASS" and num["summary"]["status"] == "PASS"
    doc = {
        "schema": REPORT_SCHEMA,
        "kind": "combined",
        "reports": [json.loads(report_to_json(sym, args.timing)), json.loads(report_to_json(num, args.timing))],
        "summary": {"status": "PASS" if ok else "FAIL"},
    }
    with open(args.out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    out.write(f"{doc['summary']['status']}: wrote {args.out}\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "comm": cmd_comm,
    "normalize": cmd_normalize,
    "repcheck": cmd_repcheck,
    "report": cmd_report,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, RejectedInput) as exc:
        err.write(f"confalg {args.command}: {exc}\n")
        return EXIT_USAGE


def main_exit() -> None:
    sys.exit(main())

"""Command line: ``towerlab run | verify | example``.

Exit codes: 0 ok, 1 a check failed, 2 usage or parse error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

from . import config
from .dsl import ParseError, parse_script
from .errors import BudgetExceeded, TowerlabError
from .families import FAMILIES, run_example
from .runner import run_script
from .verify import DEFAULT_SEED, run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="towerlab", description="Power towers, operator algebras and Jacobson sequences.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="execute a .twr script")
    run.add_argument("file")
    run.add_argument("--json", action="store_true")
    run.add_argument("--budget", type=int, help="monomial-dimension cap (default 1024)")

    ver = sub.add_parser("verify", help="run the acceptance corpus")
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ver.add_argument("--json", action="store_true")

    ex = sub.add_parser("example", help="build an example family and compare with its closed form")
    ex.add_argument("name", choices=FAMILIES)
    ex.add_argument("--p", type=int)
    ex.add_argument("--depth", type=int)
    ex.add_argument("--A", type=_coeff_list, help="comma-separated coefficients, e.g. 1,1")
    ex.add_argument("--json", action="store_true")
    return ap


def _coeff_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers like 1,2 but got {text!r}") from None


def _emit(report, as_json, out):
    if as_json:
        json.dump(report.to_dict(), out, indent=2)
        out.write("\n")
    else:
        out.write(report.human() + "\n")


def cmd_run(args, out) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"towerlab: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        script = parse_script(text)
    except ParseError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if script.spec is None:
        print(f"{args.file}: no field declaration", file=sys.stderr)
        return EXIT_USAGE
    cap = args.budget if args.budget is not None else config.get_budget()
    if cap < script.spec.p**script.spec.num_vars:
        print(f"towerlab: budget {cap} is below p^N = {script.spec.p ** script.spec.num_vars}", file=sys.stderr)
        return EXIT_USAGE
    with config.budget(cap):
        report = run_script(script, title=args.file)
    _emit(report, args.json, out)
    return report.exit_code()


def cmd_verify(args, out) -> int:
    report = run_verify(args.seed)
    _emit(report, args.json, out)
    return report.exit_code()


def cmd_example(args, out) -> int:
    if args.p is not None and args.p not in (2, 3, 5, 7, 11, 13, 17):
        print("towerlab: --p must be a prime <= 17", file=sys.stderr)
        return EXIT_USAGE
    if args.depth is not None and args.depth < 1:
        print("towerlab: --depth must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run_example(args.name, args.p, args.depth, args.A)
    except ValueError as exc:
        print(f"towerlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report, args.json, out)
    return report.exit_code()


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handler = {"run": cmd_run, "verify": cmd_verify, "example": cmd_example}[args.command]
    try:
        return handler(args, out)
    except BudgetExceeded as exc:
        print(f"towerlab: SKIP: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except TowerlabError as exc:
        print(f"towerlab: {exc}", file=sys.stderr)
        return EXIT_FAIL


def entry() -> None:
    with contextlib.suppress(BrokenPipeError):
        sys.exit(main())

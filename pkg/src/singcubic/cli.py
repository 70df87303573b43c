"""Command-line entry point: ``verify list | run | run-all | load``."""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from . import __version__
from .catalog import CaseError, builtin_ids, load
from .driver import EXECUTORS, RunOptions, VerificationReport, aggregate_exit_code, run_all, run_case

EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors already; keep the message on stderr."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _key_value(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip() or not value.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return key.strip(), value.strip()


def _specialization(text: str) -> int:
    key, value = _key_value(text)
    if key != "n":
        raise argparse.ArgumentTypeError(f"only n=<int> is supported, got {text!r}")
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"n must be an integer, got {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("n must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="verify", description="Exact verification of cubic threefold case records.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("list", help="print the built-in case ids")

    def add_run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--check", action="append", default=[], choices=sorted(EXECUTORS), metavar="KIND",
                       help="run only checks of this kind (repeatable)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--conductor", type=int, help="skip cases that need a larger cyclotomic conductor")
        p.add_argument("--timing", action="store_true", help="include per-check wall time (not byte-stable)")

    run = sub.add_parser("run", help="verify one case")
    run.add_argument("--case", required=True, help="built-in id or path to a case file")
    run.add_argument("--param", action="append", default=[], type=_key_value, metavar="NAME=VALUE",
                     help="override a parameter value in checks that specialize it (repeatable)")
    run.add_argument("--specialize", type=_specialization, metavar="n=INT", help="order of the torus root of unity")
    run.add_argument("--fail-fast", action="store_true", help="stop the case at the first failing check")
    add_run_flags(run)

    run_all_p = sub.add_parser("run-all", help="verify every built-in case")
    add_run_flags(run_all_p)

    load_p = sub.add_parser("load", help="validate a case file")
    load_p.add_argument("file")
    return parser


def _emit(reports: Sequence[VerificationReport], fmt: str, timing: bool, single: bool) -> None:
    if fmt == "json":
        if single:
            print(reports[0].to_json(timing))
        else:
            print(json.dumps([r.as_dict(timing) for r in reports], indent=2, ensure_ascii=False))
        return
    print("\n\n".join(r.to_text(timing) for r in reports))
    if not single:
        total = {k: sum(r.summary()[k] for r in reports) for k in reports[0].summary()} if reports else {}
        print("\ntotal: " + ", ".join(f"{k} {v}" for k, v in total.items()))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "list":
            print("\n".join(builtin_ids()))
            return 0
        if args.command == "load":
            rec = load(args.file)
            print(f"{rec.id}: ok ({len(rec.checks)} checks, {len(rec.generators)} generators)")
            return 0
        if args.command == "run":
            rec = load(args.case)
            names = {p.name for p in rec.parameters}
            unknown = sorted(k for k, _ in args.param if k not in names)
            if unknown:
                print(f"verify: error: case {rec.id} has no parameter {', '.join(unknown)}", file=sys.stderr)
                return EXIT_USAGE
            opts = RunOptions(params=dict(args.param), torus_n=args.specialize, conductor=args.conductor,
                              kinds=tuple(args.check), fail_fast=args.fail_fast, timing=args.timing)
            report = run_case(rec, opts)
            _emit([report], args.format, args.timing, single=True)
            return report.exit_code()
        opts = RunOptions(conductor=args.conductor, kinds=tuple(args.check), timing=args.timing)
        reports = run_all(opts)
        _emit(reports, args.format, args.timing, single=False)
        return aggregate_exit_code(reports)
    except CaseError as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())

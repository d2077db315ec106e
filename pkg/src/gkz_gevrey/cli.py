"""``gkz <command> --spec FILE [--format json|csv|text] [--out FILE]``.

Exit status: 0 when every check passes, 1 when a check fails or a
computation errors out, 2 for usage errors (bad arguments, unreadable or
invalid problem files, bad GKZ_THREADS).
"""

from __future__ import annotations

import argparse
import json
import sys

from .commands import COMMANDS, CommandError, emit_report, run_command, worker_count
from .errors import ConstraintError, ParseError
from .problem import parse_problem

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gkz", description="Gevrey solutions of the GKZ system for A = (a b).")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", required=True, metavar="FILE", help="problem file (key = value lines)")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    return p


def _usage(msg: str) -> int:
    print(f"gkz: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for bad arguments
        return int(exc.code or 0)
    try:
        worker_count()
    except ValueError:
        return _usage("GKZ_THREADS must be a positive integer")
    try:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return _usage(f"cannot read {args.spec}: {exc.strerror}")
    try:
        spec = parse_problem(text)
    except (ParseError, ConstraintError) as exc:
        return _usage(f"{args.spec}: {exc}")
    try:
        report = run_command(spec, args.command)
    except CommandError as exc:
        failure = {"command": exc.command, "error": type(exc.cause).__name__, "message": str(exc.cause)}
        print(json.dumps(failure, sort_keys=True), file=sys.stderr)
        return EXIT_CHECK_FAILED
    payload = emit_report(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    if not report.ok:
        failures = [c.name for c in report.checks if not c.passed]
        print(json.dumps({"failed_checks": failures}), file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK

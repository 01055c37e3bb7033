"""Command line entry point.

    twistsym --problem FILE [--seed N] [--samples N] [--rtol R] [--report PATH] [--json PATH] [VERB ARGS...]

Without a verb the tasks block of the problem file runs in order; with
one, only that task runs, e.g. ``twistsym --problem p.tw check-symmetry X``.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from dataclasses import replace

from .parser import ParseDiagnostic
from .problem import EXIT_INPUT, EXIT_INTERNAL, VERBS, Line, _parse_tasks, load_problem, run_problem


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistsym", description="Twisted prolongations and symmetry reduction.")
    ap.add_argument("--problem", required=True, help="problem file")
    ap.add_argument("--seed", type=int, help="oracle seed (overrides the [oracle] block)")
    ap.add_argument("--samples", type=int, help="oracle sample count")
    ap.add_argument("--rtol", type=float, help="oracle relative tolerance")
    ap.add_argument("--report", help="write the text report here instead of stdout")
    ap.add_argument("--json", help="write the result document here")
    ap.add_argument("command", nargs=argparse.REMAINDER, help=f"optional task: one of {', '.join(VERBS)}")
    return ap


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        prob = load_problem(args.problem)
    except OSError as e:
        print(f"twistsym: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ParseDiagnostic as d:
        print(f"{args.problem}:{d}", file=sys.stderr)
        return EXIT_INPUT

    cfg = prob.oracle
    overrides = {k: v for k, v in (("seed", args.seed), ("samples", args.samples), ("rtol", args.rtol)) if v is not None}
    try:
        cfg = replace(cfg, **overrides)
    except ValueError as e:
        print(f"twistsym: {e}", file=sys.stderr)
        return EXIT_INPUT

    tasks = None
    if args.command and args.command != ["run"]:
        line = " ".join(shlex.quote(w) for w in args.command)
        try:
            tasks = _parse_tasks(line, [Line(line, 0, 0)])
        except ParseDiagnostic as d:
            print(f"twistsym: {d.message}", file=sys.stderr)
            return EXIT_INPUT

    try:
        report = run_problem(prob, cfg, tasks)
    except Exception as e:  # pragma: no cover - run_problem records task errors itself
        print(f"twistsym: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL

    text = report.text()
    if args.report:
        _write(args.report, text)
    else:
        sys.stdout.write(text)
    if args.json:
        _write(args.json, json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

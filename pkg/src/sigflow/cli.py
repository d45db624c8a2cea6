"""Command-line front end.

    sigflow run SCENARIO [--out DIR] [--tol RTOL] [--seed N]
    sigflow classify --metric FILE --at X,Y [--project] [--tol TOL]
    sigflow verify --suite NAME [--seed N] [--tol TOL] [--out DIR]

Exit codes: 0 success, 2 bad input (scenario, metric file, arguments),
3 numeric failure. The default output root is ``$SIGFLOW_OUT`` or the
current directory.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .metric import DISC_BAND, MetricError, on_discriminant, project_to_discriminant
from .runner import EXIT_NUMERIC, EXIT_OK, EXIT_SCENARIO, NUMERIC_ERRORS, execute
from .scenario import ScenarioError, load_metric_file, load_scenario, parse_point

__all__ = ["main", "run_scenario", "ENV_OUT"]

ENV_OUT = "SIGFLOW_OUT"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_SCENARIO)


def _out_root(arg: str | None) -> Path:
    if arg:
        return Path(arg)
    env = os.environ.get(ENV_OUT)
    return Path(env) if env else Path.cwd()


def run_scenario(path, out: str | None = None, *, tol: float | None = None, seed: int = 0) -> int:
    """Validate and run a scenario file; returns the exit code."""
    try:
        scn = load_scenario(path)
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return EXIT_SCENARIO
    report = execute(scn, _out_root(out), seed=seed, rtol=tol)
    for r in report.results:
        if not r.ok:
            print(f"task {r.name} failed: {r.message}", file=sys.stderr)
    return report.exit_code


def _cmd_run(args) -> int:
    return run_scenario(args.scenario, args.out, tol=args.tol, seed=args.seed)


def _cmd_classify(args) -> int:
    from .report import REPORT_COLUMNS, csv_text, report_row
    from .singular import classify

    try:
        m = load_metric_file(args.metric)
        q = parse_point(args.at, "--at")
    except ScenarioError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_SCENARIO
    band = args.tol if args.tol is not None else DISC_BAND
    try:
        if args.project:
            q = tuple(project_to_discriminant(m, q))
        elif not on_discriminant(m, q, band):
            print(f"input error: ({q[0]:g}, {q[1]:g}) is not on the discriminant (use --project)", file=sys.stderr)
            return EXIT_SCENARIO
        pc = classify(m, q)
    except NUMERIC_ERRORS as e:
        print(f"numeric failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(csv_text(REPORT_COLUMNS, [report_row(pc)]))
    for r in pc.roots:
        lam = "" if r.lambdas is None else f" lambda=({r.lambdas[0]:.10g}, {r.lambdas[1]:.10g})"
        iso = " isotropic" if r.isotropic else ""
        print(f"# root {r.direction} multiplicity {r.multiplicity}{iso}{lam}")
    if pc.resonances:
        for rel in pc.resonances.relations:
            print(f"# resonance {rel}")
    for n in pc.notes:
        print(f"# note {n}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .report import atomic_write_text
    from .verify import run_suite

    try:
        checks = run_suite(args.suite, seed=args.seed, tol=args.tol)
    except KeyError:
        print(f"input error: unknown suite {args.suite!r}", file=sys.stderr)
        return EXIT_SCENARIO
    except NUMERIC_ERRORS as e:
        print(f"numeric failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    text = "".join(c.line() + "\n" for c in checks)
    sys.stdout.write(text)
    if args.out or os.environ.get(ENV_OUT):
        atomic_write_text(_out_root(args.out) / f"verify-{args.suite}.txt", text)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sigflow", description="Geodesics of signature-changing metrics on surfaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("scenario")
    r.add_argument("--out", help=f"output root (default ${ENV_OUT} or the current directory)")
    r.add_argument("--tol", type=float, help="relative integration tolerance (overrides [tolerances] rtol)")
    r.add_argument("--seed", type=int, default=0, help="seed for randomized verify tasks")
    r.set_defaults(func=_cmd_run)

    c = sub.add_parser("classify", help="classify one discriminant point")
    c.add_argument("--metric", required=True, help="file with a [metric] section")
    c.add_argument("--at", required=True, help="x,y")
    c.add_argument("--project", action="store_true", help="project the point onto the discriminant first")
    c.add_argument("--tol", type=float, help=f"relative band for lying on the discriminant (default {DISC_BAND:g})")
    c.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    c.add_argument("--out", help=argparse.SUPPRESS)
    c.set_defaults(func=_cmd_classify)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, help="suite name, 'quick' or 'all'")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, help="override the check tolerance")
    v.add_argument("--out", help="also write verify-SUITE.txt here")
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MetricError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())

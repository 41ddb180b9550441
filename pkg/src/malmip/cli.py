"""Command-line entry point: ``malmip solve | check-derivatives | list-problems``."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional

import numpy as np

from .derivcheck import check_derivatives
from .driver import solve
from .errors import DomainError, RegistryError
from .problem import SolverConstants
from .problems import list_problems, make_problem

USAGE_ERROR = 2


class _UsageError(Exception):
    pass


def _parse_pairs(items: List[str], origin: str) -> Dict[str, str]:
    pairs = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise _UsageError(f"{origin}: expected key=value, got {item!r}")
        pairs[key.strip()] = value.strip()
    return pairs


def read_config(path: str) -> Dict[str, str]:
    """Flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    lines = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                lines.append(line)
    return _parse_pairs(lines, path)


def build_constants(config: Optional[str], sets: List[str]) -> SolverConstants:
    consts = SolverConstants()
    try:
        if config:
            consts = SolverConstants.from_strings(read_config(config), consts)
        if sets:
            consts = SolverConstants.from_strings(_parse_pairs(sets, "--set"), consts)
    except (KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        raise _UsageError(str(msg)) from exc
    return consts


def _parse_x0(text: Optional[str]):
    if text is None:
        return None
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError as exc:
        raise _UsageError(f"--x0: not a comma-separated list of numbers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="malmip",
        description="Penalty-barrier interior-point solver with modified augmented Lagrangian updates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a registry problem")
    p_solve.add_argument("--problem", required=True, help="registry name (see list-problems)")
    p_solve.add_argument("--x0", help="starting point as v1,v2,...")
    p_solve.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                         help="override a solver constant (repeatable)")
    p_solve.add_argument("--config", help="file of key=value constants, applied before --set")
    p_solve.add_argument("--lp-mode", action="store_true",
                         help="LP barrier schedule; affine problems only")
    p_solve.add_argument("--trace", help="write line-delimited JSON trace records here")
    p_solve.add_argument("--report", help="write the solve report as one JSON document here")
    p_solve.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")

    p_check = sub.add_parser("check-derivatives", help="finite-difference checks of all derivatives")
    p_check.add_argument("--problem", required=True)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--points", type=int, default=20)

    sub.add_parser("list-problems", help="print registry names")
    return parser


def _cmd_solve(args) -> int:
    consts = build_constants(args.config, args.set)
    x0 = _parse_x0(args.x0)
    prob = make_problem(args.problem)
    if args.lp_mode and not prob.is_linear:
        raise _UsageError(f"--lp-mode needs an affine problem; {prob.name!r} is nonlinear")
    try:
        if args.trace:
            with open(args.trace, "w", encoding="utf-8") as stream:
                report = solve(prob, consts, x0=x0, lp_mode=args.lp_mode, trace_stream=stream)
        else:
            report = solve(prob, consts, x0=x0, lp_mode=args.lp_mode)
    except (DomainError, ValueError) as exc:
        raise _UsageError(str(exc)) from exc
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    if not args.quiet:
        c = report.counters
        print(f"{prob.name}: {report.status}" + (f" ({report.message})" if report.message else ""))
        print(f"  x = {np.array2string(report.x, precision=10)}")
        print(f"  f = {report.f_value!r}  ||F|| = {report.F_norm:.3e}  ||lambda|| = {report.lam_norm:.3e}"
              f"  ||c|| = {report.c_norm:.3e}")
        print(f"  ||grad(phi + funnel)|| = {report.grad_norm:.3e}  bound {report.certificate_bound:.3e}"
              f"  certificate {'ok' if report.certificate_ok else 'not met'}")
        print(f"  outermost {c['outermost']}  outer {c['outer']}  inner steps {c['inner_steps']}"
              f"  factorizations {c['factorizations']}  inertia shifts {c['inertia_shifts']}")
    return 0 if report.converged else 1


def _cmd_check(args) -> int:
    prob = make_problem(args.problem)
    if args.points < 1:
        raise _UsageError("--points must be positive")
    report = check_derivatives(prob, n_points=args.points, seed=args.seed)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def _cmd_list() -> int:
    for name, doc in list_problems().items():
        print(f"{name:15s} {doc}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "check-derivatives":
            return _cmd_check(args)
        return _cmd_list()
    except (RegistryError, _UsageError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"malmip: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())

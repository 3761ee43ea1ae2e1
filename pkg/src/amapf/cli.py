"""Command line entry points.

Exit codes: 0 success, 1 validation or check failure, 2 input error,
3 planner failure (the partial trace is written to stderr as JSON).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from .errors import AmapfError, GenerationExhausted, ParseError, SeparationViolation
from .planner import SQRT3x2, PlannerConfig, plan, validate_separation
from .scenario_io.bench import bench_directory
from .scenario_io.formats import (
    SolutionFile,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
)
from .scenario_io.generator import generate
from .scenario_io.render import render_svg
from .validation import check_solution

OK, FAILED, INPUT_ERROR, PLANNER_ERROR = 0, 1, 2, 3

SEPARATIONS = {"2sqrt3": SQRT3x2, "4": 4.0}


class InputError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _instance(path: str):
    try:
        return parse_instance(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _bounds(text: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("bounds must be x0,y0,x1,y1") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("bounds must be x0,y0,x1,y1")
    return tuple(vals)


def cmd_validate(args) -> int:
    inst = _instance(args.instance)
    rep = validate_separation(inst, SEPARATIONS[args.separation])
    print(json.dumps(
        {
            "passed": rep.passed,
            "threshold": rep.threshold,
            "min_pairwise": rep.min_pairwise,
            "min_clearance": rep.min_clearance if math.isfinite(rep.min_clearance) else None,
            "pair_violations": [list(v) for v in rep.pair_violations],
            "clearance_violations": [list(v) for v in rep.clearance_violations],
        },
        indent=2,
    ))
    return OK if rep.passed else FAILED


def cmd_plan(args) -> int:
    inst = _instance(args.instance)
    config = PlannerConfig(mode=args.mode, arc_segments=args.arc_segments)
    try:
        res = plan(inst, config)
    except SeparationViolation as exc:
        print(str(exc), file=sys.stderr)
        return FAILED
    except AmapfError as exc:
        dump = {"error": type(exc).__name__, "message": str(exc), "traces": [asdict(t) for t in getattr(exc, "traces", [])]}
        print(json.dumps(dump, indent=2), file=sys.stderr)
        return PLANNER_ERROR
    report = check_solution(inst, res)
    sol = serialize_solution(SolutionFile.from_plan(inst, res, report))
    if args.out:
        Path(args.out).write_bytes(sol)
    else:
        sys.stdout.write(sol.decode())
    if args.svg:
        Path(args.svg).write_bytes(render_svg(inst, res))
    print(
        f"sum_of_costs={res.sum_of_costs:.6f} initial={res.initial_assignment_cost:.6f} "
        f"branches={res.branch_counts} check={'pass' if report.passed else 'FAIL'}",
        file=sys.stderr,
    )
    return OK if report.passed else FAILED


def cmd_check(args) -> int:
    inst = _instance(args.instance)
    try:
        sol = parse_solution(_read(args.solution))
    except ParseError as exc:
        raise InputError(f"{args.solution}: {exc}") from None
    if not sol.matches(inst):
        raise InputError("solution was produced for a different instance (digest mismatch)")
    rep = check_solution(inst, sol.plan)
    print(json.dumps(rep.to_dict(), indent=2))
    return OK if rep.passed else FAILED


def cmd_generate(args) -> int:
    try:
        inst = generate(args.agents, args.obstacles, args.bounds, args.sep_min, args.seed)
    except (GenerationExhausted, ValueError) as exc:
        raise InputError(str(exc)) from None
    data = serialize_instance(inst)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())
    return OK


def cmd_bench(args) -> int:
    if not Path(args.in_dir).is_dir():
        raise InputError(f"{args.in_dir} is not a directory")
    rows, summary = bench_directory(Path(args.in_dir), Path(args.out), workers=args.workers)
    clean = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in summary.items()}
    print(json.dumps(clean, indent=2))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amapf", description="Anonymous multi-agent planning for unit disks.")
    p.add_argument("-v", "--verbose", action="store_true", help="log planner progress")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check the separation and clearance preconditions")
    s.add_argument("instance")
    s.add_argument("--separation", choices=sorted(SEPARATIONS), default="2sqrt3")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("plan", help="plan an instance and write a solution file")
    s.add_argument("instance")
    s.add_argument("--mode", choices=("modified", "classic"), default="modified")
    s.add_argument("--arc-segments", type=int, default=64)
    s.add_argument("--out")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("check", help="verify a solution against its instance")
    s.add_argument("instance")
    s.add_argument("solution")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("generate", help="sample a random admissible instance")
    s.add_argument("--agents", type=int, required=True)
    s.add_argument("--obstacles", type=int, default=0)
    s.add_argument("--sep-min", type=float, default=SQRT3x2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bounds", type=_bounds, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("bench", help="compare classic and modified modes over a directory of instances")
    s.add_argument("--in", dest="in_dir", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors are input errors
        return OK if exc.code == 0 else INPUT_ERROR
    if args.verbose:
        import logging

        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ValueError as exc:  # malformed geometry surfaced by the planner stack
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

`plan` runs a planner over a problem set and writes records.csv,
summary.csv, cdf.csv, paths.json, and meta.json into --out.  `rpc` reads
one JSON request from stdin and writes a canonical JSON result to stdout
(exit 0) or a JSON error object (exit 2); it is the process boundary the
scripting bindings talk to, and its `plan` result document is byte
identical to the paths.json the `plan` subcommand writes.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path as FsPath

from . import __version__
from .bench import (BenchmarkOutcome, canonical_json, cdf_csv, paths_document,
                    records_csv, run_benchmark, summarize_stats, summary_csv)
from .collision import ValidationContext
from .lanes import as_config
from .motion import validate_motion_rake
from .planners import Path, PlannerSettings
from .problems import ProblemSet, load_problem_set
from .simplify import SimplifySettings, simplify_path


def _apply_overrides(settings: PlannerSettings, args) -> PlannerSettings:
    updates = {}
    if getattr(args, "iters", None) is not None:
        updates["max_iterations"] = args.iters
    if getattr(args, "resolution", None) is not None:
        updates["resolution"] = args.resolution
    if getattr(args, "range", None) is not None:
        updates["range"] = args.range
    if getattr(args, "scalar", False):
        updates["width"] = 1
    return dataclasses.replace(settings, **updates) if updates else settings


def _load_set(args) -> ProblemSet:
    return load_problem_set(args.problems, robot_path=args.robot,
                            spheres_path=args.spheres)


def _run_set(pset: ProblemSet, args) -> tuple[PlannerSettings, BenchmarkOutcome]:
    settings = _apply_overrides(pset.settings, args)
    outcome = run_benchmark(pset, planner=args.planner, trials=args.trials,
                            simplify=args.simplify, settings=settings)
    return settings, outcome


def cmd_plan(args) -> int:
    pset = _load_set(args)
    settings, outcome = _run_set(pset, args)
    stats = summarize_stats(outcome.records)
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(records_csv(outcome.records))
    (out / "summary.csv").write_text(summary_csv(args.planner, stats))
    if stats.successes:
        (out / "cdf.csv").write_text(cdf_csv(outcome.records))
    doc = paths_document(pset.name, args.planner, outcome.solutions)
    (out / "paths.json").write_text(canonical_json(doc))
    meta = {
        "version": __version__,
        "set": pset.name,
        "planner": args.planner,
        "trials": args.trials,
        "simplify": bool(args.simplify),
        "settings": dataclasses.asdict(settings),
        "timing_scope": "planning and simplification only; parsing, tracing, "
                        "and scheduling are one-time setup outside all timers",
        "counters": outcome.counters,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"{pset.name}: {args.planner} x{args.trials} trials, "
          f"{stats.successes}/{stats.count} solved "
          f"(median {stats.median_ms:.2f} ms)" if stats.successes else
          f"{pset.name}: {args.planner} solved nothing")
    return 0


def _case_by_id(pset: ProblemSet, pid: str):
    for case in pset.problems:
        if case.id == pid:
            return case
    raise ValueError(f"unknown problem id {pid!r}")


def _context_for(pset: ProblemSet, case, settings: PlannerSettings) -> ValidationContext:
    return ValidationContext(program=pset.robot.program, model=pset.robot.model,
                             pairs=pset.robot.pairs, env=case.env,
                             width=settings.width)


def handle_rpc(request: dict) -> dict:
    """Dispatch one rpc request; returns the canonical response payload."""
    op = request.get("op")
    ns = argparse.Namespace(
        robot=request.get("robot"), spheres=request.get("spheres"),
        problems=request.get("problems"),
        planner=request.get("planner", "rrtc"),
        trials=int(request.get("trials", 1)),
        simplify=bool(request.get("simplify", False)),
        iters=request.get("iters"), resolution=request.get("resolution"),
        range=request.get("range"), scalar=bool(request.get("scalar", False)),
    )
    if ns.problems is None:
        raise ValueError("request is missing the problem set reference 'problems'")
    pset = _load_set(ns)
    settings = _apply_overrides(pset.settings, ns)
    if op == "load":
        return {
            "name": pset.name,
            "dof": pset.robot.tree.dof,
            "problem_ids": [c.id for c in pset.problems],
            "settings": dataclasses.asdict(settings),
        }
    if op == "plan":
        outcome = run_benchmark(pset, planner=ns.planner, trials=ns.trials,
                                simplify=ns.simplify, settings=settings)
        return paths_document(pset.name, ns.planner, outcome.solutions)
    if op == "validate_motion":
        case = _case_by_id(pset, request["id"])
        ctx = _context_for(pset, case, settings)
        start = as_config(request["start"])
        goal = as_config(request["goal"])
        valid = validate_motion_rake(start, goal, ctx, settings.resolution,
                                     backward=settings.rake_backward)
        return {"id": case.id, "valid": bool(valid)}
    if op == "simplify":
        case = _case_by_id(pset, request["id"])
        ctx = _context_for(pset, case, settings)
        waypoints = [as_config(w) for w in request["waypoints"]]
        path = simplify_path(Path(waypoints), ctx,
                             SimplifySettings(resolution=settings.resolution))
        return {
            "id": case.id,
            "cost": float(path.cost),
            "waypoints": [[float(v) for v in w] for w in path.waypoints],
        }
    raise ValueError(f"unknown rpc op {op!r}")


def cmd_rpc(args) -> int:
    try:
        raw = FsPath(args.request).read_text() if args.request else sys.stdin.read()
        request = json.loads(raw)
        response = handle_rpc(request)
    except Exception as e:  # mirrored to the scripting surface as exceptions
        sys.stdout.write(canonical_json(
            {"error": f"{type(e).__name__}: {e}", "ok": False}))
        return 2
    sys.stdout.write(canonical_json(response))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vecmp", description="Lane-parallel sampling-based motion planning")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="benchmark a planner over a problem set")
    plan.add_argument("--robot", help="URDF file (overrides the set's reference)")
    plan.add_argument("--spheres", help="sphere model file (overrides the set's)")
    plan.add_argument("--problems", required=True, help="problem set YAML file")
    plan.add_argument("--planner", choices=("rrtc", "prm"), default="rrtc")
    plan.add_argument("--trials", type=int, default=1)
    plan.add_argument("--iters", type=int, help="iteration cap override")
    plan.add_argument("--resolution", type=float, help="validation resolution override")
    plan.add_argument("--range", type=float, help="RRT-Connect extension range override")
    plan.add_argument("--simplify", action="store_true",
                      help="shortcut and smooth successful paths")
    plan.add_argument("--scalar", action="store_true",
                      help="run the width-1 scalar reference build")
    plan.add_argument("--out", required=True, help="output directory")
    plan.set_defaults(func=cmd_plan)

    rpc = sub.add_parser("rpc", help="serve one JSON request from stdin")
    rpc.add_argument("--request", help="read the request from a file instead")
    rpc.set_defaults(func=cmd_rpc)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:
        if args.command == "rpc":
            raise
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

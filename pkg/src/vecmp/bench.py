"""Benchmark harness: run planners over a problem set, emit records and stats.

Per (problem, trial) the harness times planning and simplification
separately with a monotonic nanosecond clock; one-time work (parsing,
tracing, scheduling) happens at load and is never inside the timed
region.  Trials re-create the sampler from scratch, so outputs are
identical across trials and only the time fields vary between runs.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass

import numpy as np

from .planners import PlannerSettings, PlanningProblem, prm, rrt_connect
from .problems import ProblemSet
from .simplify import SimplifySettings, simplify_path

PLANNERS = {"rrtc": rrt_connect, "prm": prm}


@dataclass(frozen=True)
class RunRecord:
    problem_id: str
    trial: int
    success: bool
    planning_ns: int
    simplify_ns: int
    initial_cost: float | None  # present iff success
    simplified_cost: float | None
    iterations: int


@dataclass
class BenchmarkOutcome:
    records: list[RunRecord]
    solutions: list[dict]  # canonical per-problem path payloads (trial 0)
    counters: dict


def run_benchmark(
    pset: ProblemSet,
    planner: str = "rrtc",
    trials: int = 1,
    simplify: bool = False,
    settings: PlannerSettings | None = None,
) -> BenchmarkOutcome:
    """Run `trials` independent repeats of every problem, in (problem, trial)
    order.  Returns per-run records plus trial-0 solution payloads."""
    if planner not in PLANNERS:
        raise ValueError(f"unknown planner {planner!r} (choose from {sorted(PLANNERS)})")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    plan = PLANNERS[planner]
    settings = settings if settings is not None else pset.settings
    records: list[RunRecord] = []
    solutions: list[dict] = []
    blocks_total = 0
    motion_checks_total = 0
    for case in pset.problems:
        problem = PlanningProblem(robot=pset.robot, env=case.env,
                                  start=case.start, goal=case.goal)
        for trial in range(trials):
            t0 = time.perf_counter_ns()
            result = plan(problem, settings)
            t1 = time.perf_counter_ns()
            simplify_ns = 0
            initial_cost = simplified_cost = None
            final_path = result.path
            if result.success:
                initial_cost = result.path.cost
                simplified_cost = initial_cost
                if simplify:
                    ctx = problem.context(settings)
                    ssettings = SimplifySettings(resolution=settings.resolution)
                    s0 = time.perf_counter_ns()
                    final_path = simplify_path(result.path, ctx, ssettings)
                    simplify_ns = time.perf_counter_ns() - s0
                    simplified_cost = final_path.cost
            blocks_total += result.blocks_evaluated
            motion_checks_total += result.motion_checks
            records.append(RunRecord(
                problem_id=case.id, trial=trial, success=result.success,
                planning_ns=t1 - t0, simplify_ns=simplify_ns,
                initial_cost=initial_cost, simplified_cost=simplified_cost,
                iterations=result.iterations))
            if trial == 0:
                payload: dict = {"id": case.id, "success": result.success,
                                 "iterations": result.iterations}
                if result.success:
                    payload["initial_cost"] = float(initial_cost)
                    payload["cost"] = float(simplified_cost)
                    payload["waypoints"] = [
                        [float(v) for v in w] for w in final_path.waypoints]
                solutions.append(payload)
    counters = {
        "blocks_evaluated": blocks_total,
        "motion_checks": motion_checks_total,
        "mean_blocks_per_motion_check": (
            round(blocks_total / motion_checks_total, 3) if motion_checks_total else None),
    }
    return BenchmarkOutcome(records=records, solutions=solutions, counters=counters)


@dataclass(frozen=True)
class SummaryStats:
    count: int
    successes: int
    success_rate: float
    mean_ms: float | None  # None when nothing succeeded
    q1_ms: float | None
    median_ms: float | None
    q3_ms: float | None
    p95_ms: float | None
    mean_simplify_ms: float | None


def summarize_stats(records: list[RunRecord]) -> SummaryStats:
    """Mean / Q1 / median / Q3 / 95% of successful planning times (linear
    interpolation), success rate over all records, mean simplification time."""
    if not records:
        raise ValueError("cannot summarize zero records")
    ok = [r for r in records if r.success]
    if not ok:
        return SummaryStats(count=len(records), successes=0, success_rate=0.0,
                            mean_ms=None, q1_ms=None, median_ms=None, q3_ms=None,
                            p95_ms=None, mean_simplify_ms=None)
    times = np.asarray([r.planning_ns for r in ok], dtype=np.float64) / 1e6
    q1, median, q3, p95 = np.percentile(times, [25, 50, 75, 95])
    simplify_ms = np.asarray([r.simplify_ns for r in ok], dtype=np.float64) / 1e6
    return SummaryStats(
        count=len(records), successes=len(ok),
        success_rate=len(ok) / len(records),
        mean_ms=float(times.mean()), q1_ms=float(q1), median_ms=float(median),
        q3_ms=float(q3), p95_ms=float(p95),
        mean_simplify_ms=float(simplify_ms.mean()))


def format_ms(value: float | None) -> str:
    """Milliseconds with two decimals, the format used by the summary table."""
    return "" if value is None else f"{value:.2f}"


def format_success(rate: float) -> str:
    pct = round(rate * 100.0, 1)
    return f"{pct:g}%"


SUMMARY_COLUMNS = ("planner", "records", "successes", "success_rate", "mean_ms",
                   "q1_ms", "median_ms", "q3_ms", "p95_ms", "mean_simplify_ms")

RECORD_COLUMNS = ("problem_id", "trial", "success", "planning_ns", "simplify_ns",
                  "initial_cost", "simplified_cost", "iterations")


def records_csv(records: list[RunRecord]) -> str:
    lines = [",".join(RECORD_COLUMNS)]
    for r in records:
        lines.append(",".join([
            r.problem_id, str(r.trial), str(int(r.success)), str(r.planning_ns),
            str(r.simplify_ns),
            "" if r.initial_cost is None else f"{r.initial_cost:.9g}",
            "" if r.simplified_cost is None else f"{r.simplified_cost:.9g}",
            str(r.iterations)]))
    return "\n".join(lines) + "\n"


def summary_csv(planner: str, stats: SummaryStats) -> str:
    row = [planner, str(stats.count), str(stats.successes),
           format_success(stats.success_rate), format_ms(stats.mean_ms),
           format_ms(stats.q1_ms), format_ms(stats.median_ms),
           format_ms(stats.q3_ms), format_ms(stats.p95_ms),
           format_ms(stats.mean_simplify_ms)]
    return ",".join(SUMMARY_COLUMNS) + "\n" + ",".join(row) + "\n"


def cdf_csv(records: list[RunRecord]) -> str:
    """(time_ms, cumulative fraction) pairs over successful runs, plot-ready."""
    ok = sorted(r.planning_ns / 1e6 for r in records if r.success)
    lines = ["time_ms,cumulative_fraction"]
    for i, t in enumerate(ok):
        lines.append(f"{t:.6f},{(i + 1) / len(ok):.6f}")
    return "\n".join(lines) + "\n"


def canonical_json(payload) -> str:
    """Stable serialization used for paths.json and the rpc surface."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      allow_nan=False) + "\n"


def paths_document(pset_name: str, planner: str, solutions: list[dict]) -> dict:
    return {"set": pset_name, "planner": planner, "problems": solutions}

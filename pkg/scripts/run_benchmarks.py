"""Run both planners over the bundled problem sets and print summary rows.

Writes full CSV/JSON outputs under results/ (same artifacts as `vecmp plan`).
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from vecmp.cli import main
from vecmp.resources import problem_set_path

RUNS = [
    ("toy_planar.yaml", "rrtc", ["--trials", "5", "--simplify"]),
    ("toy_planar.yaml", "prm", ["--trials", "3"]),
    ("arm_reach.yaml", "rrtc", ["--trials", "3", "--simplify"]),
]


def run() -> None:
    out_root = Path(__file__).resolve().parents[1] / "results"
    for set_name, planner, extra in RUNS:
        out = out_root / f"{Path(set_name).stem}_{planner}"
        argv = ["plan", "--problems", str(problem_set_path(set_name)),
                "--planner", planner, "--out", str(out), *extra]
        code = main(argv)
        if code != 0:
            raise SystemExit(code)
        print((out / "summary.csv").read_text().strip().split("\n")[1])


if __name__ == "__main__":
    run()

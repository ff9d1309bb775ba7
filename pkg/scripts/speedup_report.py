"""Measure batched-vs-scalar state validation throughput per environment.

Reports states/second for the width-8 and width-1 builds of the bundled
seven-joint arm, plus the mean rake early-exit block counts, matching the
counters the benchmark CLI writes to meta.json.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from vecmp.collision import ValidationContext, load_environment
from vecmp.lanes import soa_from_aos
from vecmp.motion import raked_motion_check
from vecmp.planners import build_robot
from vecmp.resources import environment_path, robot_path
from vecmp.robot import load_sphere_model, parse_urdf

ENVS = ("tabletop.yaml", "shelf.yaml", "cage.yaml")
N_STATES = 4096
N_MOTIONS = 300


def throughput(robot, env, width: int, configs) -> float:
    ctx = ValidationContext(program=robot.program, model=robot.model,
                            pairs=robot.pairs, env=env, width=width)
    blocks = [soa_from_aos(configs[i:i + width], width=width)
              for i in range(0, len(configs), width)]
    t0 = time.perf_counter()
    for block in blocks:
        ctx.validate_block(block)
    return len(configs) / (time.perf_counter() - t0)


def main() -> None:
    tree = parse_urdf(robot_path("arm7.urdf").read_text())
    model = load_sphere_model(tree, robot_path("arm7_spheres.yaml").read_text())
    robot = build_robot(tree, model)
    rng = np.random.default_rng(0)
    lims = robot.limits
    configs = [rng.uniform(lims[:, 0], lims[:, 1]).astype(np.float32)
               for _ in range(N_STATES)]
    print(f"{'environment':<12} {'w8 states/s':>12} {'w1 states/s':>12} "
          f"{'ratio':>6} {'rake blocks/motion':>19}")
    for name in ENVS:
        env = load_environment(environment_path(name).read_text())
        throughput(robot, env, 8, configs[:256])  # warm up
        wide = throughput(robot, env, 8, configs)
        narrow = throughput(robot, env, 1, configs)
        ctx = ValidationContext(program=robot.program, model=robot.model,
                                pairs=robot.pairs, env=env, width=8)
        for i in range(N_MOTIONS):
            raked_motion_check(configs[2 * i], configs[2 * i + 1], ctx, 0.05)
        mean_blocks = ctx.blocks_evaluated / ctx.motion_checks
        print(f"{env.name:<12} {wide:>12,.0f} {narrow:>12,.0f} "
              f"{wide / narrow:>5.1f}x {mean_blocks:>19.2f}")


if __name__ == "__main__":
    main()

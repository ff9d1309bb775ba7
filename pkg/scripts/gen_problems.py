"""Regenerate the bundled problem sets.

Draws Halton configurations per environment, keeps collision-free ones,
pairs them up, and keeps pairs that RRT-Connect solves within a small
iteration budget, preferring pairs whose direct motion is blocked so the
planners have actual work to do.  Output is committed under
src/vecmp/resources/problems/; rerun only to rebuild those files.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import yaml

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from vecmp.collision import ValidationContext, load_environment
from vecmp.halton import HaltonSampler
from vecmp.lanes import l2_distance
from vecmp.motion import validate_motion_rake
from vecmp.planners import PlannerSettings, PlanningProblem, build_robot, rrt_connect
from vecmp.robot import load_sphere_model, parse_urdf

RES = Path(__file__).resolve().parents[1] / "src" / "vecmp" / "resources"


def load_robot(urdf_name: str, spheres_name: str):
    tree = parse_urdf((RES / "robots" / urdf_name).read_text())
    model = load_sphere_model(tree, (RES / "robots" / spheres_name).read_text())
    return build_robot(tree, model)


def collect_problems(robot, env_name: str, settings: PlannerSettings,
                     count: int, prefix: str, shrink: float = 0.92,
                     max_iters: int = 4000) -> list[dict]:
    env = load_environment((RES / "environments" / env_name).read_text())
    ctx = ValidationContext(program=robot.program, model=robot.model,
                            pairs=robot.pairs, env=env, width=settings.width)
    lo, hi = robot.limits[:, 0], robot.limits[:, 1]
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    sampler = HaltonSampler(np.stack([mid - shrink * half, mid + shrink * half], axis=1))
    valid = []
    attempts = 0
    while len(valid) < 8 * count and attempts < 4000:
        q = sampler.draw()
        attempts += 1
        if ctx.state_valid(q):
            valid.append(q)
    rng = np.random.default_rng(7)
    order = rng.permutation(len(valid))
    pairs = [(valid[order[2 * i]], valid[order[2 * i + 1]])
             for i in range(len(order) // 2)]
    pairs = [p for p in pairs if l2_distance(p[0], p[1]) >= 0.8]
    blocked = [p for p in pairs
               if not validate_motion_rake(p[0], p[1], ctx, settings.resolution)]
    free = [p for p in pairs
            if validate_motion_rake(p[0], p[1], ctx, settings.resolution)]
    # Mostly blocked direct motions (real search work), a few free-space ones.
    quota_blocked = (count * 2 + 2) // 3
    candidates = blocked[:quota_blocked] + free + blocked[quota_blocked:]
    budget = PlannerSettings(resolution=settings.resolution, range=settings.range,
                             max_iterations=max_iters, width=settings.width)
    problems = []
    for start, goal in candidates:
        if len(problems) == count:
            break
        result = rrt_connect(
            PlanningProblem(robot=robot, env=env, start=start, goal=goal), budget)
        if result.success:
            problems.append({
                "id": f"{prefix}_{len(problems):02d}",
                "environment": f"../environments/{env_name}",
                "start": [round(float(v), 6) for v in start],
                "goal": [round(float(v), 6) for v in goal],
            })
    if len(problems) < count:
        raise SystemExit(f"only {len(problems)}/{count} problems for {env_name}")
    return problems


def write_set(path: Path, doc: dict) -> None:
    path.write_text(yaml.safe_dump(doc, sort_keys=False))
    print(f"wrote {path} ({len(doc['problems'])} problems)")


def main() -> None:
    out = RES / "problems"
    out.mkdir(exist_ok=True)

    planar = load_robot("planar2.urdf", "planar2_spheres.yaml")
    toy_settings = PlannerSettings(resolution=0.05, range=1.5,
                                   prm_k=5, prm_batch=16)
    toy_problems = []
    toy_problems += collect_problems(planar, "wall_gap.yaml", toy_settings, 12, "gap")
    toy_problems += collect_problems(planar, "posts.yaml", toy_settings, 10, "post")
    toy_problems += collect_problems(planar, "corridor.yaml", toy_settings, 10, "cordr")
    write_set(out / "toy_planar.yaml", {
        "name": "toy-planar",
        "robot": "../robots/planar2.urdf",
        "spheres": "../robots/planar2_spheres.yaml",
        "settings": {"resolution": 0.05, "range": 1.5, "prm_k": 5, "prm_batch": 16},
        "problems": toy_problems,
    })

    arm = load_robot("arm7.urdf", "arm7_spheres.yaml")
    arm_settings = PlannerSettings(resolution=0.05, range=2.0)
    arm_problems = []
    arm_problems += collect_problems(arm, "tabletop.yaml", arm_settings, 2, "table",
                                     shrink=0.7, max_iters=20000)
    arm_problems += collect_problems(arm, "shelf.yaml", arm_settings, 2, "shelf",
                                     shrink=0.7, max_iters=20000)
    arm_problems += collect_problems(arm, "cage.yaml", arm_settings, 2, "cage",
                                     shrink=0.7, max_iters=20000)
    write_set(out / "arm_reach.yaml", {
        "name": "arm-reach",
        "robot": "../robots/arm7.urdf",
        "spheres": "../robots/arm7_spheres.yaml",
        "settings": {"resolution": 0.05, "range": 2.0},
        "problems": arm_problems,
    })


if __name__ == "__main__":
    main()

"""Problem set files: robot reference, per-problem environment, start, goal.

A problem set is a YAML document next to the files it references:

    name: toy-planar
    robot: robots/planar2.urdf
    spheres: robots/planar2_spheres.yaml
    ignore_self_pairs: [[fore_link, tool_link]]     # optional
    settings: {resolution: 0.05, range: 1.5}        # optional overrides
    problems:
      - id: gap_00
        environment: environments/wall_gap.yaml     # path or inline mapping
        start: [0.3, -0.4]
        goal: [-1.2, 0.9]

Loading resolves every reference, compiles the robot once, and validates
all starts and goals against joint limits, aggregating failures by id.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np
import yaml

from .collision import Environment, environment_to_doc, load_environment, parse_environment
from .lanes import as_config
from .planners import PlannerSettings, Robot, build_robot
from .robot import load_sphere_model, parse_urdf

SETTING_FIELDS = ("resolution", "range", "max_iterations", "prm_k", "prm_batch",
                  "rake_backward")


class ProblemSetError(ValueError):
    """Raised when a problem set file is missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class ProblemCase:
    id: str
    env: Environment
    start: np.ndarray
    goal: np.ndarray
    env_ref: str | None = None  # original file reference, kept for round-trips


@dataclass
class ProblemSet:
    name: str
    robot: Robot
    settings: PlannerSettings
    problems: list[ProblemCase]
    robot_ref: str | None = None
    spheres_ref: str | None = None
    ignore_self_pairs: list[tuple[str, str]] = field(default_factory=list)


def _read(path: FsPath, what: str) -> str:
    if not path.is_file():
        raise ProblemSetError(f"{what} not found: {path}")
    return path.read_text()


def load_problem_set(
    path: str | FsPath,
    robot_path: str | FsPath | None = None,
    spheres_path: str | FsPath | None = None,
) -> ProblemSet:
    """Load and fully resolve a problem set file.

    `robot_path` / `spheres_path` override the file's own references (the
    CLI's --robot / --spheres flags).  Relative references resolve against
    the problem file's directory.
    """
    path = FsPath(path)
    try:
        doc = yaml.safe_load(_read(path, "problem set"))
    except yaml.YAMLError as e:
        raise ProblemSetError(f"malformed problem set: {e}") from e
    if not isinstance(doc, dict):
        raise ProblemSetError("problem set document must be a mapping")
    base = path.parent

    def resolve(ref: str | FsPath) -> FsPath:
        ref = FsPath(ref)
        return ref if ref.is_absolute() else base / ref

    robot_ref = str(robot_path) if robot_path is not None else doc.get("robot")
    spheres_ref = str(spheres_path) if spheres_path is not None else doc.get("spheres")
    if not robot_ref or not spheres_ref:
        raise ProblemSetError("problem set needs robot and spheres references")
    tree = parse_urdf(_read(resolve(robot_ref), "robot file"))
    model = load_sphere_model(tree, _read(resolve(spheres_ref), "sphere file"))
    ignore = [tuple(p) for p in doc.get("ignore_self_pairs", []) or []]
    for pair in ignore:
        if len(pair) != 2:
            raise ProblemSetError(f"ignore_self_pairs entry {pair!r} is not a pair")
    robot = build_robot(tree, model, set(ignore))

    settings = PlannerSettings()
    overrides = doc.get("settings", {}) or {}
    unknown = set(overrides) - set(SETTING_FIELDS)
    if unknown:
        raise ProblemSetError(f"unknown settings fields: {sorted(unknown)}")
    settings = dataclasses.replace(settings, **overrides)

    problems: list[ProblemCase] = []
    errors: list[str] = []
    env_cache: dict[str, Environment] = {}
    lo, hi = robot.limits[:, 0], robot.limits[:, 1]
    for i, entry in enumerate(doc.get("problems", []) or []):
        pid = str(entry.get("id", f"problem_{i}"))
        try:
            env_spec = entry["environment"]
            if isinstance(env_spec, str):
                if env_spec not in env_cache:
                    env_cache[env_spec] = load_environment(
                        _read(resolve(env_spec), f"environment for {pid}"))
                # resolved reference survives saving the set elsewhere
                env, env_ref = env_cache[env_spec], str(resolve(env_spec))
            else:
                env, env_ref = parse_environment(env_spec), None
            start = as_config(entry["start"])
            goal = as_config(entry["goal"])
            for name, q in (("start", start), ("goal", goal)):
                if q.shape[0] != tree.dof:
                    raise ProblemSetError(
                        f"{name} has dim {q.shape[0]}, robot dof is {tree.dof}")
                if np.any(q < lo) or np.any(q > hi):
                    raise ProblemSetError(f"{name} outside joint limits")
            problems.append(ProblemCase(id=pid, env=env, start=start, goal=goal,
                                        env_ref=env_ref))
        except (KeyError, ValueError) as e:
            errors.append(f"{pid}: {e}")
    if errors:
        raise ProblemSetError(
            f"{len(errors)} invalid problem(s): " + "; ".join(errors))
    if not problems:
        raise ProblemSetError("problem set contains no problems")
    return ProblemSet(name=str(doc.get("name", path.stem)), robot=robot,
                      settings=settings, problems=problems,
                      robot_ref=str(resolve(robot_ref)),
                      spheres_ref=str(resolve(spheres_ref)),
                      ignore_self_pairs=ignore)


def save_problem_set(pset: ProblemSet, path: str | FsPath) -> None:
    """Write a problem set document equivalent to what load_problem_set read."""
    defaults = PlannerSettings()
    overrides = {
        f: getattr(pset.settings, f)
        for f in SETTING_FIELDS
        if getattr(pset.settings, f) != getattr(defaults, f)
    }
    doc: dict = {
        "name": pset.name,
        "robot": pset.robot_ref,
        "spheres": pset.spheres_ref,
    }
    if pset.ignore_self_pairs:
        doc["ignore_self_pairs"] = [list(p) for p in pset.ignore_self_pairs]
    if overrides:
        doc["settings"] = overrides
    doc["problems"] = [
        {
            "id": p.id,
            "environment": p.env_ref if p.env_ref else environment_to_doc(p.env),
            "start": [float(v) for v in p.start],
            "goal": [float(v) for v in p.goal],
        }
        for p in pset.problems
    ]
    FsPath(path).write_text(yaml.safe_dump(doc, sort_keys=False))

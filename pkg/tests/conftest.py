import numpy as np
import pytest

from vecmp.collision import ValidationContext, load_environment
from vecmp.planners import build_robot
from vecmp.program import schedule_program
from vecmp.resources import environment_path, problem_set_path, robot_path
from vecmp.robot import load_sphere_model, parse_urdf
from vecmp.trace import optimize_graph, trace_kinematics

TOY_ENV_NAMES = ("wall_gap.yaml", "posts.yaml", "corridor.yaml")
ARM_ENV_NAMES = ("tabletop.yaml", "shelf.yaml", "cage.yaml")


def _load_robot(urdf: str, spheres: str):
    tree = parse_urdf(robot_path(urdf).read_text())
    model = load_sphere_model(tree, robot_path(spheres).read_text())
    return tree, model


@pytest.fixture(scope="session")
def toy_robot():
    tree, model = _load_robot("planar2.urdf", "planar2_spheres.yaml")
    return build_robot(tree, model)


@pytest.fixture(scope="session")
def arm_robot():
    tree, model = _load_robot("arm7.urdf", "arm7_spheres.yaml")
    return build_robot(tree, model)


@pytest.fixture(scope="session")
def arm_graphs():
    """(raw, optimized) trace graphs for the seven-joint arm."""
    tree, model = _load_robot("arm7.urdf", "arm7_spheres.yaml")
    raw = trace_kinematics(tree, model)
    return tree, model, raw, optimize_graph(raw)


@pytest.fixture(scope="session")
def toy_envs():
    return [load_environment(environment_path(n).read_text()) for n in TOY_ENV_NAMES]


@pytest.fixture(scope="session")
def arm_envs():
    return [load_environment(environment_path(n).read_text()) for n in ARM_ENV_NAMES]


@pytest.fixture(scope="session")
def toy_problems_path():
    return problem_set_path("toy_planar.yaml")


def make_context(robot, env, width=8, prune=True) -> ValidationContext:
    return ValidationContext(program=robot.program, model=robot.model,
                             pairs=robot.pairs, env=env, width=width, prune=prune)

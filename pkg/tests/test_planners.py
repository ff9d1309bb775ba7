import dataclasses
import math

import numpy as np
import pytest

from vecmp.collision import Environment, SphereObstacle, load_environment
from vecmp.halton import HaltonSampler
from vecmp.lanes import l2_distance
from vecmp.planners import (InvalidProblemError, PlannerSettings, PlanningProblem,
                            build_robot, prm, revalidate_path, rrt_connect)
from vecmp.resources import environment_path
from vecmp.robot import load_sphere_model, parse_urdf
from conftest import make_context

PENDULUM = """
<robot name="pendulum">
  <link name="base"/><link name="arm"/>
  <joint name="j" type="revolute">
    <parent link="base"/><child link="arm"/>
    <axis xyz="0 0 1"/><limit lower="-3.1" upper="3.1"/>
  </joint>
</robot>
"""


@pytest.fixture(scope="module")
def pendulum():
    tree = parse_urdf(PENDULUM)
    model = load_sphere_model(tree, "arm:\n  - {x: 0.5, y: 0.0, z: 0.0, r: 0.1}\n")
    return build_robot(tree, model)


@pytest.fixture(scope="module")
def sealed_env():
    # blocks the joint band around q = 1.2; with limits [-3.1, 3.1] there is
    # no way around, so q=0 and q=2 live in different free components
    block = 0.5 * np.array([math.cos(1.2), math.sin(1.2), 0.0])
    return Environment(primitives=[SphereObstacle(center=block, radius=0.08)],
                       name="sealed")


def toy_settings(**overrides):
    base = PlannerSettings(resolution=0.05, range=1.5, prm_k=5, prm_batch=16)
    return dataclasses.replace(base, **overrides)


class TestRrtConnect:
    def test_start_equals_goal(self, toy_robot):
        q = np.array([0.4, -0.2], np.float32)
        problem = PlanningProblem(robot=toy_robot, env=Environment(name="empty"),
                                  start=q, goal=q)
        result = rrt_connect(problem, toy_settings())
        assert result.success and result.iterations == 0
        assert len(result.path.waypoints) == 2
        assert np.array_equal(result.path.waypoints[0], result.path.waypoints[1])

    def test_empty_env_direct_connect_on_first_iteration(self, toy_robot):
        start = np.array([0.0, 0.0], np.float32)
        goal = np.array([0.1, 0.1], np.float32)
        problem = PlanningProblem(robot=toy_robot, env=Environment(name="empty"),
                                  start=start, goal=goal)
        result = rrt_connect(problem, toy_settings())
        assert result.success and result.iterations == 1
        # the first Halton draw is within range of both trees, so the path is
        # exactly start -> h1 -> goal
        h1 = HaltonSampler(toy_robot.limits).draw()
        assert len(result.path.waypoints) == 3
        assert np.array_equal(result.path.waypoints[0], start)
        assert np.array_equal(result.path.waypoints[1], h1)
        assert np.array_equal(result.path.waypoints[2], goal)

    def test_wall_gap_problem_scalar_equivalence(self, toy_robot):
        env = load_environment(environment_path("wall_gap.yaml").read_text())
        start = np.array([1.55, -2.2556], np.float32)
        goal = np.array([2.325, 0.3222], np.float32)
        problem = PlanningProblem(robot=toy_robot, env=env, start=start, goal=goal)
        wide = rrt_connect(problem, toy_settings(width=8))
        narrow = rrt_connect(problem, toy_settings(width=1))
        assert wide.success and narrow.success
        assert wide.iterations == narrow.iterations
        assert len(wide.path.waypoints) == len(narrow.path.waypoints)
        for a, b in zip(wide.path.waypoints, narrow.path.waypoints):
            assert np.array_equal(a, b)

    def test_returned_path_revalidates(self, toy_robot, toy_envs):
        start = np.array([1.55, -2.2556], np.float32)
        goal = np.array([2.325, 0.3222], np.float32)
        for env in toy_envs:
            problem = PlanningProblem(robot=toy_robot, env=env, start=start, goal=goal)
            result = rrt_connect(problem, toy_settings())
            assert result.success
            ctx = make_context(toy_robot, env)
            assert revalidate_path(result.path, ctx, 0.05)
            assert np.array_equal(result.path.waypoints[0], start)
            assert np.array_equal(result.path.waypoints[-1], goal)

    def test_cost_lower_bound(self, toy_robot, toy_envs):
        start = np.array([1.55, -2.2556], np.float32)
        goal = np.array([2.325, 0.3222], np.float32)
        for env in toy_envs:
            problem = PlanningProblem(robot=toy_robot, env=env, start=start, goal=goal)
            result = rrt_connect(problem, toy_settings())
            assert result.path.cost >= l2_distance(start, goal) - 1e-6

    def test_deterministic_across_runs(self, toy_robot, toy_envs):
        start = np.array([-2.7125, 2.2556], np.float32)
        goal = np.array([0.3875, -2.6852], np.float32)
        problem = PlanningProblem(robot=toy_robot, env=toy_envs[1],
                                  start=start, goal=goal)
        a = rrt_connect(problem, toy_settings())
        b = rrt_connect(problem, toy_settings())
        assert a.iterations == b.iterations
        assert all(np.array_equal(x, y)
                   for x, y in zip(a.path.waypoints, b.path.waypoints))

    def test_invalid_start_is_setup_error(self, toy_robot):
        env = Environment(primitives=[SphereObstacle(center=np.zeros(3), radius=3.0)])
        problem = PlanningProblem(robot=toy_robot, env=env,
                                  start=np.zeros(2, np.float32),
                                  goal=np.ones(2, np.float32))
        with pytest.raises(InvalidProblemError, match="collision"):
            rrt_connect(problem, toy_settings())

    def test_out_of_limits_start_rejected_at_construction(self, toy_robot):
        with pytest.raises(InvalidProblemError, match="limits"):
            PlanningProblem(robot=toy_robot, env=Environment(name="empty"),
                            start=np.array([9.0, 0.0], np.float32),
                            goal=np.zeros(2, np.float32))

    def test_sealed_goal_exhausts_iterations(self, pendulum, sealed_env):
        problem = PlanningProblem(robot=pendulum, env=sealed_env,
                                  start=np.array([0.0], np.float32),
                                  goal=np.array([2.0], np.float32))
        result = rrt_connect(problem, toy_settings(max_iterations=300))
        assert not result.success
        assert result.path is None
        assert result.iterations == 300


class TestPrm:
    def test_empty_env_first_round_connects(self, toy_robot):
        start = np.array([-0.5, 0.4], np.float32)
        goal = np.array([0.7, -0.6], np.float32)
        problem = PlanningProblem(robot=toy_robot, env=Environment(name="empty"),
                                  start=start, goal=goal)
        result = prm(problem, toy_settings())
        assert result.success
        assert result.iterations == 16  # one sampling round
        assert result.path.cost >= l2_distance(start, goal) - 1e-6

    def test_sealed_goal_fails_after_max_iterations(self, pendulum, sealed_env):
        problem = PlanningProblem(robot=pendulum, env=sealed_env,
                                  start=np.array([0.0], np.float32),
                                  goal=np.array([2.0], np.float32))
        result = prm(problem, toy_settings(max_iterations=192, prm_k=4, prm_batch=64))
        assert not result.success
        assert result.iterations == 192

    def test_toy_problem_scalar_equivalence(self, toy_robot, toy_envs):
        start = np.array([1.55, -2.2556], np.float32)
        goal = np.array([2.325, 0.3222], np.float32)
        problem = PlanningProblem(robot=toy_robot, env=toy_envs[0],
                                  start=start, goal=goal)
        wide = prm(problem, toy_settings(width=8))
        narrow = prm(problem, toy_settings(width=1))
        assert wide.success and narrow.success
        assert wide.iterations == narrow.iterations
        assert all(np.array_equal(a, b)
                   for a, b in zip(wide.path.waypoints, narrow.path.waypoints))

    def test_paths_revalidate_and_pin_endpoints(self, toy_robot, toy_envs):
        start = np.array([1.55, -2.2556], np.float32)
        goal = np.array([2.325, 0.3222], np.float32)
        for env in toy_envs:
            problem = PlanningProblem(robot=toy_robot, env=env, start=start, goal=goal)
            result = prm(problem, toy_settings())
            assert result.success
            assert np.array_equal(result.path.waypoints[0], start)
            assert np.array_equal(result.path.waypoints[-1], goal)
            assert revalidate_path(result.path, make_context(toy_robot, env), 0.05)

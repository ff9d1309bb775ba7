"""Deterministic RRT-Connect and PRM over the batch validation primitives.

Both planners draw from a per-run Halton sequence (one draw is one
iteration), validate every edge with the raked motion validator, and use
the exact nearest-neighbor index, so two runs with identical inputs
produce identical trees, roadmaps, and waypoints.  Lane width changes
throughput only: per-lane arithmetic is width-independent, so a width-1
run returns the same paths as a width-8 run.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .collision import Environment, ValidationContext
from .halton import HaltonSampler
from .lanes import DEFAULT_WIDTH, Config, l2_distance
from .motion import validate_motion_rake
from .nn import NNIndex
from .program import KinematicProgram
from .robot import KinematicTree, SelfCollisionPairs, SphereModel


class InvalidProblemError(ValueError):
    """Start or goal rejected at setup (out of limits or in collision)."""


@dataclass
class PlannerSettings:
    resolution: float = 0.02  # C-space l2 units between checked states
    range: float = 2.0  # max RRT-Connect extension per step
    max_iterations: int = 1_000_000
    prm_k: int = 8
    prm_batch: int = 128
    rake_backward: bool = False
    width: int = DEFAULT_WIDTH  # lane count; 1 is the scalar reference

    def __post_init__(self) -> None:
        if self.resolution <= 0 or self.range <= 0:
            raise ValueError("resolution and range must be positive")
        if self.max_iterations < 1 or self.prm_k < 1 or self.prm_batch < 1:
            raise ValueError("iteration, k, and batch settings must be >= 1")


@dataclass(frozen=True)
class Robot:
    """Compiled robot bundle: structure, spheres, program, limits."""

    tree: KinematicTree
    model: SphereModel
    pairs: SelfCollisionPairs
    program: KinematicProgram
    limits: np.ndarray  # (dof, 2) float64


def build_robot(tree: KinematicTree, model: SphereModel,
                ignore_pairs: set[tuple[str, str]] | None = None) -> Robot:
    from .robot import default_self_collision_pairs
    from .trace import optimize_graph, trace_kinematics
    from .program import schedule_program

    pairs = default_self_collision_pairs(tree, ignore_pairs)
    program = schedule_program(optimize_graph(trace_kinematics(tree, model)))
    return Robot(tree=tree, model=model, pairs=pairs, program=program,
                 limits=tree.joint_limits())


@dataclass(frozen=True)
class PlanningProblem:
    robot: Robot
    env: Environment
    start: Config
    goal: Config

    def __post_init__(self) -> None:
        for name, q in (("start", self.start), ("goal", self.goal)):
            qv = np.asarray(q, dtype=np.float32).reshape(-1)
            if qv.shape[0] != self.robot.tree.dof:
                raise InvalidProblemError(
                    f"{name} has dim {qv.shape[0]}, robot dof is {self.robot.tree.dof}")
            lo, hi = self.robot.limits[:, 0], self.robot.limits[:, 1]
            if np.any(qv < lo) or np.any(qv > hi):
                raise InvalidProblemError(f"{name} violates joint limits")
            object.__setattr__(self, name, qv)

    def context(self, settings: PlannerSettings) -> ValidationContext:
        return ValidationContext(
            program=self.robot.program, model=self.robot.model,
            pairs=self.robot.pairs, env=self.env, width=settings.width)


@dataclass(frozen=True)
class Path:
    """Waypoints from start to goal; consecutive motions are rake-valid."""

    waypoints: list[Config]

    @property
    def cost(self) -> float:
        return float(sum(l2_distance(a, b)
                         for a, b in zip(self.waypoints, self.waypoints[1:])))


@dataclass(frozen=True)
class PlanResult:
    path: Path | None
    iterations: int
    blocks_evaluated: int = 0
    motion_checks: int = 0

    @property
    def success(self) -> bool:
        return self.path is not None


def _check_endpoints(problem: PlanningProblem, ctx: ValidationContext) -> None:
    if not ctx.state_valid(problem.start):
        raise InvalidProblemError("start configuration is in collision")
    if not ctx.state_valid(problem.goal):
        raise InvalidProblemError("goal configuration is in collision")


TRAPPED, ADVANCED, REACHED = range(3)


class _Tree:
    def __init__(self, root: Config):
        self.configs: list[Config] = [root]
        self.parents: list[int] = [-1]
        self.index = NNIndex(root.shape[0])
        self.index.insert(root, 0)

    def add(self, q: Config, parent: int) -> int:
        nid = len(self.configs)
        self.configs.append(q)
        self.parents.append(parent)
        self.index.insert(q, nid)
        return nid

    def chain(self, nid: int) -> list[Config]:
        out = []
        while nid >= 0:
            out.append(self.configs[nid])
            nid = self.parents[nid]
        out.reverse()
        return out


def _extend(tree: _Tree, target: Config, ctx: ValidationContext,
            settings: PlannerSettings) -> tuple[int, int]:
    near_id, dist = tree.index.nearest(target)
    near = tree.configs[near_id]
    if dist == 0.0:
        return REACHED, near_id
    if dist <= settings.range:
        cand, reached = target, True
    else:
        step = np.float32(settings.range / dist)
        cand = (near + step * (target - near)).astype(np.float32)
        reached = False
    if validate_motion_rake(near, cand, ctx, settings.resolution,
                            backward=settings.rake_backward):
        nid = tree.add(cand, near_id)
        return (REACHED if reached else ADVANCED), nid
    return TRAPPED, -1


def _connect(tree: _Tree, target: Config, ctx: ValidationContext,
             settings: PlannerSettings) -> int:
    while True:
        status, nid = _extend(tree, target, ctx, settings)
        if status != ADVANCED:
            return nid if status == REACHED else -1


def rrt_connect(problem: PlanningProblem, settings: PlannerSettings | None = None
                ) -> PlanResult:
    """Bidirectional RRT-Connect: extend one tree toward the sample, greedily
    connect the other toward the new node, swap roles, repeat."""
    settings = settings or PlannerSettings()
    ctx = problem.context(settings)
    _check_endpoints(problem, ctx)
    if np.array_equal(problem.start, problem.goal):
        return PlanResult(Path([problem.start.copy(), problem.goal.copy()]),
                          iterations=0)
    start_tree, goal_tree = _Tree(problem.start), _Tree(problem.goal)
    grow, other = start_tree, goal_tree
    sampler = HaltonSampler(problem.robot.limits)
    for iteration in range(1, settings.max_iterations + 1):
        sample = sampler.draw()
        status, new_id = _extend(grow, sample, ctx, settings)
        if status != TRAPPED:
            bridge = grow.configs[new_id]
            reached_id = _connect(other, bridge, ctx, settings)
            if reached_id >= 0:
                if grow is start_tree:
                    forward, backward = grow.chain(new_id), other.chain(reached_id)
                else:
                    forward, backward = other.chain(reached_id), grow.chain(new_id)
                waypoints = forward + backward[::-1][1:]
                return PlanResult(Path(waypoints), iterations=iteration,
                                  blocks_evaluated=ctx.blocks_evaluated,
                                  motion_checks=ctx.motion_checks)
        grow, other = other, grow
    return PlanResult(None, iterations=settings.max_iterations,
                      blocks_evaluated=ctx.blocks_evaluated,
                      motion_checks=ctx.motion_checks)


def _shortest_path(adjacency: list[list[tuple[int, float]]], source: int,
                   target: int) -> list[int] | None:
    """Uniform-cost search; ties broken by vertex insertion order."""
    n = len(adjacency)
    best = [np.inf] * n
    parent = [-1] * n
    best[source] = 0.0
    heap: list[tuple[float, int]] = [(0.0, source)]
    settled = [False] * n
    while heap:
        cost, v = heapq.heappop(heap)
        if settled[v]:
            continue
        settled[v] = True
        if v == target:
            out = []
            while v >= 0:
                out.append(v)
                v = parent[v]
            out.reverse()
            return out
        for u, w in adjacency[v]:
            c = cost + w
            if c < best[u]:
                best[u] = c
                parent[u] = v
                heapq.heappush(heap, (c, u))
    return None


def prm(problem: PlanningProblem, settings: PlannerSettings | None = None
        ) -> PlanResult:
    """Incremental probabilistic roadmap.

    Rounds of prm_batch Halton draws; invalid samples are discarded (each
    draw still counts as one iteration), valid samples connect to their
    prm_k nearest existing vertices through rake-validated edges, and the
    start-goal shortest path is queried after every round.
    """
    settings = settings or PlannerSettings()
    ctx = problem.context(settings)
    _check_endpoints(problem, ctx)
    vertices: list[Config] = [problem.start, problem.goal]
    adjacency: list[list[tuple[int, float]]] = [[], []]
    index = NNIndex(problem.start.shape[0])
    index.insert(problem.start, 0)
    index.insert(problem.goal, 1)
    if np.array_equal(problem.start, problem.goal):
        return PlanResult(Path([problem.start.copy(), problem.goal.copy()]),
                          iterations=0)
    sampler = HaltonSampler(problem.robot.limits)
    iterations = 0
    while iterations < settings.max_iterations:
        batch = min(settings.prm_batch, settings.max_iterations - iterations)
        for _ in range(batch):
            sample = sampler.draw()
            iterations += 1
            if not ctx.state_valid(sample):
                continue
            neighbors = index.k_nearest(sample, settings.prm_k)
            vid = len(vertices)
            vertices.append(sample)
            adjacency.append([])
            index.insert(sample, vid)
            for nbr, dist in neighbors:
                if validate_motion_rake(vertices[nbr], sample, ctx,
                                        settings.resolution,
                                        backward=settings.rake_backward):
                    adjacency[nbr].append((vid, dist))
                    adjacency[vid].append((nbr, dist))
        route = _shortest_path(adjacency, 0, 1)
        if route is not None:
            waypoints = [vertices[v] for v in route]
            return PlanResult(Path(waypoints), iterations=iterations,
                              blocks_evaluated=ctx.blocks_evaluated,
                              motion_checks=ctx.motion_checks)
    return PlanResult(None, iterations=iterations,
                      blocks_evaluated=ctx.blocks_evaluated,
                      motion_checks=ctx.motion_checks)


def revalidate_path(path: Path, ctx: ValidationContext, resolution: float,
                    backward: bool = False) -> bool:
    """Re-check every consecutive motion of a path from scratch."""
    if len(path.waypoints) < 2:
        return False
    if not ctx.state_valid(path.waypoints[0]):
        return False
    return all(
        validate_motion_rake(a, b, ctx, resolution, backward=backward)
        for a, b in zip(path.waypoints, path.waypoints[1:])
    )

"""Straight-line motion validation with the spatially distributed rake.

A motion from start to goal is discretized into n states at parameters
i/n for i = 1..n (the goal is checked, the start is the caller's
responsibility).  With lane width W and stratum length s = ceil(n / W),
lane k owns indices {k*s + j : j = 1..s}; iteration j checks one index
from every stratum in a single block, so an invalid region anywhere along
the motion is usually hit within the first few iterations instead of
after walking half the motion sequentially.  Indices above n in the last
partial strata are masked by duplicating lane 0's parameter (the padding
rule), so every index in 1..n is checked exactly once.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .collision import ValidationContext
from .lanes import Config, interpolate_lanes, l2_distance


def discretization_count(start: Config, goal: Config, resolution: float) -> int:
    """Number of checked states: max(1, ceil(distance / resolution))."""
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    return max(1, math.ceil(l2_distance(start, goal) / resolution))


def rake_strata(n: int, width: int) -> tuple[int, np.ndarray]:
    """Stratum length s and the (width,) array of stratum base offsets."""
    s = math.ceil(n / width)
    return s, np.arange(width, dtype=np.int64) * s


def raked_motion_check(
    start: Config,
    goal: Config,
    ctx: ValidationContext,
    resolution: float,
    backward: bool = False,
) -> tuple[bool, int]:
    """Rake verdict plus the number of block evaluations performed.

    Returns False at the first block containing an invalid in-range lane;
    at most ceil(n / width) blocks are ever evaluated.  `backward` combs
    each stratum from its top index down instead of up; the verdict is
    order-independent, only early-exit latency changes.
    """
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    s = np.asarray(start, dtype=np.float32).reshape(-1)
    g = np.asarray(goal, dtype=np.float32).reshape(-1)
    if s.shape != g.shape:
        raise ValueError(f"dimension mismatch: {s.shape[0]} vs {g.shape[0]}")
    n = discretization_count(s, g, resolution)
    stratum, bases = rake_strata(n, ctx.width)
    ctx.motion_checks += 1
    blocks = 0
    steps = range(stratum, 0, -1) if backward else range(1, stratum + 1)
    for j in steps:
        indices = bases + j
        in_range = indices <= n
        # lane 0's index j is always <= n; duplicate it into masked lanes.
        # True division keeps each lane's parameter bitwise equal to i/n no
        # matter the width, which is what makes scalar and raked verdicts agree.
        t64 = np.where(in_range, indices, indices[0]) / n
        block = interpolate_lanes(s, g, t64.astype(np.float32))
        n_in = int(np.count_nonzero(in_range))
        if n_in < block.valid_count:
            block = replace(block, valid_count=n_in)
        valid = ctx.validate_block(block)
        blocks += 1
        if not bool(np.all(valid[in_range])):
            return False, blocks
    return True, blocks


def validate_motion_rake(
    start: Config,
    goal: Config,
    ctx: ValidationContext,
    resolution: float,
    backward: bool = False,
) -> bool:
    """True iff every state at i/n for i = 1..n validates (goal inclusive)."""
    verdict, _ = raked_motion_check(start, goal, ctx, resolution, backward)
    return verdict

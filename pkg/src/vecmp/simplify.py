"""Path post-processing: randomized shortcutting and B-spline smoothing.

Shortcutting draws pairs of points uniformly along the path's arc length
from a seeded generator and splices in the straight motion when it is
valid and strictly shorter, so cost never increases and runs replay given
the seed.  Smoothing pulls each interior waypoint toward the local cubic
B-spline point, keeping a proposal only when both incident motions stay
valid.  Endpoints never move and outputs always re-validate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collision import ValidationContext
from .lanes import Config, l2_distance
from .motion import validate_motion_rake
from .planners import Path


@dataclass
class SimplifySettings:
    shortcut_attempts: int = 100
    smooth_rounds: int = 3
    rng_seed: int = 0
    resolution: float = 0.02  # shared with the planner

    def __post_init__(self) -> None:
        if self.shortcut_attempts < 0 or self.smooth_rounds < 0:
            raise ValueError("attempt and round counts must be non-negative")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")


def path_cost(path: Path) -> float:
    """Sum of consecutive l2 distances along the waypoints."""
    if len(path.waypoints) < 2:
        raise ValueError("a path needs at least two waypoints")
    return path.cost


def _cumulative_lengths(waypoints: list[Config]) -> np.ndarray:
    seg = [l2_distance(a, b) for a, b in zip(waypoints, waypoints[1:])]
    return np.concatenate([[0.0], np.cumsum(seg, dtype=np.float64)])


def _point_at(waypoints: list[Config], cum: np.ndarray, u: float
              ) -> tuple[int, Config]:
    """Segment index and interpolated configuration at arc length u."""
    seg = int(np.searchsorted(cum, u, side="right")) - 1
    seg = min(max(seg, 0), len(waypoints) - 2)
    length = cum[seg + 1] - cum[seg]
    t = 0.0 if length <= 0 else (u - cum[seg]) / length
    t32 = np.float32(min(max(t, 0.0), 1.0))
    a, b = waypoints[seg], waypoints[seg + 1]
    return seg, (a + t32 * (b - a)).astype(np.float32)


def shortcut(path: Path, ctx: ValidationContext, settings: SimplifySettings) -> Path:
    """Randomized shortcutting; cost(out) <= cost(in), validity preserved."""
    waypoints = [w.copy() for w in path.waypoints]
    if len(waypoints) <= 2 or settings.shortcut_attempts == 0:
        return Path(waypoints)
    rng = np.random.default_rng(settings.rng_seed)
    for _ in range(settings.shortcut_attempts):
        cum = _cumulative_lengths(waypoints)
        total = float(cum[-1])
        if total <= 0:
            break
        u1, u2 = sorted(float(v) for v in rng.uniform(0.0, total, size=2))
        seg1, qa = _point_at(waypoints, cum, u1)
        seg2, qb = _point_at(waypoints, cum, u2)
        if seg1 >= seg2:
            continue  # same segment: the chord is the arc, nothing to gain
        chord = l2_distance(qa, qb)
        if (u2 - u1) - chord <= 1e-6:
            continue
        # The two boundary sub-motions are checked too, so the spliced path
        # re-validates at this resolution, not just at the original endpoints.
        if not validate_motion_rake(waypoints[seg1], qa, ctx, settings.resolution):
            continue
        if not validate_motion_rake(qa, qb, ctx, settings.resolution):
            continue
        if not validate_motion_rake(qb, waypoints[seg2 + 1], ctx, settings.resolution):
            continue
        spliced = waypoints[:seg1 + 1] + [qa, qb] + waypoints[seg2 + 1:]
        spliced = [w for i, w in enumerate(spliced)
                   if i == 0 or not np.array_equal(w, spliced[i - 1])]
        # Guard against single-precision rounding eating the predicted gain.
        if Path(spliced).cost <= Path(waypoints).cost:
            waypoints = spliced
    return Path(waypoints)


def bspline_smooth(path: Path, ctx: ValidationContext,
                   settings: SimplifySettings) -> Path:
    """Iterated local cubic smoothing with validity gating on each proposal."""
    waypoints = [w.copy() for w in path.waypoints]
    if len(waypoints) <= 2 or settings.smooth_rounds == 0:
        return Path(waypoints)
    sixth = np.float32(1.0 / 6.0)
    four = np.float32(4.0)
    for _ in range(settings.smooth_rounds):
        for i in range(1, len(waypoints) - 1):
            prev_wp, cur, nxt = waypoints[i - 1], waypoints[i], waypoints[i + 1]
            proposal = ((prev_wp + four * cur + nxt) * sixth).astype(np.float32)
            if validate_motion_rake(prev_wp, proposal, ctx, settings.resolution) and \
                    validate_motion_rake(proposal, nxt, ctx, settings.resolution):
                waypoints[i] = proposal
    return Path(waypoints)


def simplify_path(path: Path, ctx: ValidationContext,
                  settings: SimplifySettings) -> Path:
    """Shortcut then smooth, the standard post-processing pipeline."""
    return bspline_smooth(shortcut(path, ctx, settings), ctx, settings)

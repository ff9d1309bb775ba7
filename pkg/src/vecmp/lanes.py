"""Lane-wide numeric primitives and AoS/SoA layout conversion.

A "lane" is one slot of a fixed-width batch: a ConfigBlock stores W joint
configurations side by side, one contiguous row per joint, so a single
numpy operation advances all W configurations at once.  Everything here is
single precision; reference computations in the tests use doubles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

#: Default lane count.  Power of two >= 4; width 1 doubles as the scalar
#: reference configuration of the whole stack.
DEFAULT_WIDTH = 8

#: A configuration is a 1-D float32 array of joint values (radians for
#: revolute joints, meters for prismatic ones).
Config = np.ndarray

#: One boolean per lane of an associated ConfigBlock.
LaneMask = np.ndarray


def as_config(values: Iterable[float]) -> Config:
    """Coerce to a float32 configuration, rejecting non-finite entries."""
    q = np.asarray(values, dtype=np.float32).reshape(-1)
    if q.size == 0:
        raise ValueError("configuration must have at least one joint value")
    if not np.all(np.isfinite(q)):
        raise ValueError("configuration contains non-finite values")
    return q


@dataclass(frozen=True)
class ConfigBlock:
    """A batch of up to `width` configurations in struct-of-arrays form.

    `data[j, k]` is joint j of lane k.  Lanes at index >= valid_count are
    padding and always replicate lane 0, so padding can never produce a
    verdict that differs from a real lane's.
    """

    dim: int
    width: int
    data: np.ndarray  # (dim, width) float32
    valid_count: int

    def __post_init__(self) -> None:
        if self.data.shape != (self.dim, self.width):
            raise ValueError(
                f"block data shape {self.data.shape} != ({self.dim}, {self.width})"
            )
        if not (1 <= self.valid_count <= self.width):
            raise ValueError("valid_count must be in [1, width]")

    def lane(self, k: int) -> Config:
        return self.data[:, k].copy()


def soa_from_aos(configs: Sequence[Config], width: int = DEFAULT_WIDTH) -> ConfigBlock:
    """Pack at most `width` configurations into a ConfigBlock.

    Unused lanes replicate lane 0 (the padding rule), which keeps padding
    inside joint limits whenever lane 0 is.
    """
    if len(configs) == 0:
        raise ValueError("cannot build a block from zero configurations")
    if len(configs) > width:
        raise ValueError(f"{len(configs)} configurations exceed lane width {width}")
    first = np.asarray(configs[0], dtype=np.float32).reshape(-1)
    dim = first.shape[0]
    data = np.empty((dim, width), dtype=np.float32)
    for k, q in enumerate(configs):
        q = np.asarray(q, dtype=np.float32).reshape(-1)
        if q.shape[0] != dim:
            raise ValueError(f"configuration {k} has dim {q.shape[0]}, expected {dim}")
        data[:, k] = q
    data[:, len(configs):] = data[:, :1]
    return ConfigBlock(dim=dim, width=width, data=data, valid_count=len(configs))


def aos_from_soa(block: ConfigBlock) -> list[Config]:
    """Unpack the meaningful lanes of a block; inverse of soa_from_aos."""
    return [block.data[:, k].copy() for k in range(block.valid_count)]


def interpolate_lanes(start: Config, goal: Config, params: np.ndarray) -> ConfigBlock:
    """Linear interpolation start + t * (goal - start), one t per lane.

    All lanes count as valid; callers that interpolate fewer states than
    lanes must duplicate an in-range t into the padding lanes themselves.
    """
    s = np.asarray(start, dtype=np.float32).reshape(-1)
    g = np.asarray(goal, dtype=np.float32).reshape(-1)
    if s.shape != g.shape:
        raise ValueError(f"dimension mismatch: {s.shape[0]} vs {g.shape[0]}")
    t = np.asarray(params, dtype=np.float32).reshape(-1)
    data = s[:, None] + t[None, :] * (g - s)[:, None]
    return ConfigBlock(dim=s.shape[0], width=t.shape[0], data=data, valid_count=t.shape[0])


def l2_distance(a: Config, b: Config) -> float:
    """Euclidean distance between two configurations (single precision)."""
    av = np.asarray(a, dtype=np.float32).reshape(-1)
    bv = np.asarray(b, dtype=np.float32).reshape(-1)
    if av.shape != bv.shape:
        raise ValueError(f"dimension mismatch: {av.shape[0]} vs {bv.shape[0]}")
    d = av - bv
    return float(np.sqrt(np.sum(d * d, dtype=np.float32)))


def sincos_lanes(angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lane-wide sine and cosine in float32.

    Relies on numpy's float32 trig kernels being elementwise deterministic
    regardless of array length (guarded by a regression test); this is what
    makes width-1 and width-8 evaluations bitwise identical per lane.
    """
    a = np.ascontiguousarray(angles, dtype=np.float32)
    return np.sin(a), np.cos(a)

"""Deterministic quasi-random configuration sampling via Halton sequences.

One prime base per joint, in joint order; draw k is a pure function of
(dof, limits, k), so planner runs replay exactly.  The sequence index
starts at 1 because index 0 maps every dimension to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lanes import Config


def first_primes(n: int) -> list[int]:
    primes: list[int] = []
    candidate = 2
    while len(primes) < n:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return primes


def radical_inverse(base: int, index: int) -> float:
    """Digit-reversed fraction of `index` in the given base, in (0, 1)."""
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if index < 1:
        raise ValueError(f"index must be >= 1, got {index}")
    inv = 1.0 / base
    result = 0.0
    scale = inv
    while index > 0:
        index, digit = divmod(index, base)
        result += digit * scale
        scale *= inv
    return result


@dataclass
class HaltonSampler:
    """Sequential multi-dimensional Halton draw scaled to joint limits."""

    limits: np.ndarray  # (dof, 2) float64 [lo, hi] rows
    index: int = 1
    bases: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        self.limits = np.asarray(self.limits, dtype=np.float64).reshape(-1, 2)
        if np.any(self.limits[:, 0] > self.limits[:, 1]):
            raise ValueError("joint limits must satisfy lo <= hi")
        if not self.bases:
            self.bases = tuple(first_primes(self.limits.shape[0]))

    @property
    def dof(self) -> int:
        return self.limits.shape[0]

    def draw(self) -> Config:
        """Next configuration; advances the sequence index."""
        lo, hi = self.limits[:, 0], self.limits[:, 1]
        u = np.asarray([radical_inverse(b, self.index) for b in self.bases])
        self.index += 1
        return (lo + u * (hi - lo)).astype(np.float32)


def halton_next(sampler: HaltonSampler) -> Config:
    return sampler.draw()

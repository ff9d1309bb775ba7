"""Exact nearest-neighbor queries over a growing set of configurations.

Points live in a flat struct-of-arrays buffer (one row per joint) that is
grown in lane-sized chunks and scanned with whole-array distance math, so
queries stay exact: the structure accelerates, it never approximates.
Ties break toward the smallest insertion order.
"""

from __future__ import annotations

import numpy as np

from .lanes import Config

_GROW_CHUNK = 64


class NNIndex:
    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self._data = np.empty((dim, _GROW_CHUNK), dtype=np.float32)
        self._payloads: list = []
        self._ids: set = set()

    def __len__(self) -> int:
        return len(self._payloads)

    def insert(self, q: Config, payload) -> None:
        qv = np.asarray(q, dtype=np.float32).reshape(-1)
        if qv.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: {qv.shape[0]} vs {self.dim}")
        if payload in self._ids:
            raise ValueError(f"duplicate payload id: {payload!r}")
        n = len(self._payloads)
        if n == self._data.shape[1]:
            grown = np.empty((self.dim, n + _GROW_CHUNK), dtype=np.float32)
            grown[:, :n] = self._data
            self._data = grown
        self._data[:, n] = qv
        self._payloads.append(payload)
        self._ids.add(payload)

    def _distances(self, q: Config) -> np.ndarray:
        qv = np.asarray(q, dtype=np.float32).reshape(-1)
        if qv.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: {qv.shape[0]} vs {self.dim}")
        n = len(self._payloads)
        diff = self._data[:, :n] - qv[:, None]
        return np.sqrt(np.sum(diff * diff, axis=0, dtype=np.float32))

    def nearest(self, q: Config) -> tuple[object, float]:
        """Exact closest point's (payload, distance); first-inserted wins ties."""
        if not self._payloads:
            raise ValueError("nearest query on an empty index")
        d = self._distances(q)
        best = int(np.argmin(d))
        return self._payloads[best], float(d[best])

    def k_nearest(self, q: Config, k: int) -> list[tuple[object, float]]:
        """The k exact closest points, ascending distance (fewer if smaller)."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self._payloads:
            raise ValueError("k_nearest query on an empty index")
        d = self._distances(q)
        order = np.argsort(d, kind="stable")[:k]
        return [(self._payloads[int(i)], float(d[int(i)])) for i in order]

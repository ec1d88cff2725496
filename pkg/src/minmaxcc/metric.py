"""Pair indexing and triangle-inequality separation for metric LPs."""

from __future__ import annotations

import numpy as np

from .lp import Constraint


class PairIndex:
    """Maps unordered vertex pairs ``u < v`` to consecutive offsets from ``base``."""

    def __init__(self, n: int, base: int = 0):
        self.n = n
        self.base = base
        self._index = np.full((n, n), -1, dtype=int)
        k = base
        for u in range(n):
            for v in range(u + 1, n):
                self._index[u, v] = self._index[v, u] = k
                k += 1
        self.size = k - base

    def __call__(self, u: int, v: int) -> int:
        if u == v:
            raise KeyError(f"no variable for the diagonal pair ({u}, {u})")
        return int(self._index[u, v])

    def matrix(self, values: np.ndarray) -> np.ndarray:
        """Symmetric distance matrix with zero diagonal read from ``values``."""
        d = np.zeros((self.n, self.n))
        mask = self._index >= 0
        d[mask] = values[self._index[mask]]
        return d

    def triangle(self, u: int, w: int, v: int) -> Constraint:
        """``d(u,w) + d(w,v) >= d(u,v)``."""
        return Constraint.build(
            [(self(u, w), 1.0), (self(w, v), 1.0), (self(u, v), -1.0)], ">=", 0.0
        )

    def separate_triangles(self, values: np.ndarray, tol: float = 1e-6) -> list[Constraint]:
        d = self.matrix(values)
        # excess[u, v, w] = d(u,v) - d(u,w) - d(w,v)
        excess = d[:, :, None] - d[:, None, :] - d[None, :, :]
        hits = np.argwhere(excess > tol)
        return [self.triangle(int(u), int(w), int(v)) for u, v, w in hits if u < v]

    def all_triangles(self) -> list[Constraint]:
        n = self.n
        return [
            self.triangle(u, w, v)
            for u in range(n)
            for v in range(u + 1, n)
            for w in range(n)
            if w != u and w != v
        ]

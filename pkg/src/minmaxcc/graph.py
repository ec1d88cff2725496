"""Instance and solution types plus all cost accounting.

Vertices are integers ``0..n-1``.  Weights are floats; every cost comparison
in the package uses ``COST_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

COST_TOL = 1e-9

POSITIVE = 1
NEGATIVE = -1


class GraphError(ValueError):
    """Malformed instance (bad vertex id, self-loop, duplicate pair, ...)."""


class PartitionError(ValueError):
    def __init__(self, errors: Sequence[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


def _check_pair(n: int, u: int, v: int, what: str) -> tuple[int, int]:
    if not (0 <= u < n and 0 <= v < n):
        raise GraphError(f"{what} ({u}, {v}) out of range for n={n}")
    if u == v:
        raise GraphError(f"self-loop {what} ({u}, {v})")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SignedEdge:
    u: int
    v: int
    weight: float
    sign: int


@dataclass(frozen=True)
class SignedGraph:
    """A correlation-clustering instance: each edge carries a weight and a sign."""

    n: int
    edges: tuple[SignedEdge, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError("negative vertex count")
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            key = _check_pair(self.n, e.u, e.v, "edge")
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            if not e.weight >= 0:
                raise GraphError(f"edge {key} has negative weight {e.weight}")
            if e.sign not in (POSITIVE, NEGATIVE):
                raise GraphError(f"edge {key} has invalid sign {e.sign!r}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple]) -> SignedGraph:
        """Build from ``(u, v, sign)`` or ``(u, v, sign, weight)`` tuples.

        ``sign`` may be ``+1``/``-1`` or ``'+'``/``'-'``.
        """
        out = []
        for item in edges:
            u, v, sign = item[0], item[1], item[2]
            w = float(item[3]) if len(item) > 3 else 1.0
            if sign in ("+", POSITIVE):
                s = POSITIVE
            elif sign in ("-", NEGATIVE):
                s = NEGATIVE
            else:
                raise GraphError(f"invalid sign {sign!r}")
            out.append(SignedEdge(int(u), int(v), w, s))
        return cls(n, tuple(out))

    @classmethod
    def complete(cls, n: int, negative: Iterable[tuple[int, int]] = ()) -> SignedGraph:
        """Unit-weight complete graph; listed pairs negative, the rest positive."""
        neg = {_check_pair(n, u, v, "pair") for u, v in negative}
        edges = tuple(
            SignedEdge(u, v, 1.0, NEGATIVE if (u, v) in neg else POSITIVE)
            for u in range(n)
            for v in range(u + 1, n)
        )
        return cls(n, edges)

    @cached_property
    def complete_flag(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2 and all(
            e.weight == 1.0 for e in self.edges
        )

    @cached_property
    def positive_matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for e in self.edges:
            if e.sign == POSITIVE:
                w[e.u, e.v] = w[e.v, e.u] = e.weight
        return w

    @cached_property
    def negative_matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for e in self.edges:
            if e.sign == NEGATIVE:
                w[e.u, e.v] = w[e.v, e.u] = e.weight
        return w

    @property
    def negative_edges(self) -> list[SignedEdge]:
        return [e for e in self.edges if e.sign == NEGATIVE]

    @property
    def positive_edges(self) -> list[SignedEdge]:
        return [e for e in self.edges if e.sign == POSITIVE]


@dataclass(frozen=True)
class MulticutInstance:
    """Weighted graph plus source-sink pairs that must end up in different parts."""

    n: int
    edges: tuple[tuple[int, int, float], ...]
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        seen: set[tuple[int, int]] = set()
        for u, v, w in self.edges:
            key = _check_pair(self.n, u, v, "edge")
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            if not w >= 0:
                raise GraphError(f"edge {key} has negative weight {w}")
        for s, t in self.pairs:
            _check_pair(self.n, s, t, "pair")

    @classmethod
    def build(
        cls,
        n: int,
        edges: Iterable[tuple],
        pairs: Iterable[tuple[int, int]] = (),
    ) -> MulticutInstance:
        es = []
        for item in edges:
            w = float(item[2]) if len(item) > 2 else 1.0
            es.append((int(item[0]), int(item[1]), w))
        return cls(n, tuple(es), tuple((int(s), int(t)) for s, t in pairs))

    @property
    def num_pairs(self) -> int:
        return len(self.pairs)

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for u, v, wt in self.edges:
            w[u, v] = w[v, u] = wt
        return w

    @cached_property
    def terminals(self) -> frozenset[int]:
        return frozenset(v for p in self.pairs for v in p)


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty vertex sets.  Use :meth:`of` to validate against ``n``."""

    parts: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, n: int, parts: Iterable[Iterable[int]]) -> Partition:
        parts = tuple(frozenset(p) for p in parts)
        errors = validate_partition(n, parts)
        if errors:
            raise PartitionError(errors)
        return cls(parts)

    @classmethod
    def singletons(cls, n: int) -> Partition:
        return cls(tuple(frozenset([v]) for v in range(n)))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i: int) -> frozenset[int]:
        return self.parts[i]

    def canonical(self) -> Partition:
        """Parts ordered by their smallest vertex."""
        return Partition(tuple(sorted(self.parts, key=min)))

    def labels(self, n: int) -> list[int]:
        out = [-1] * n
        for i, p in enumerate(self.parts):
            for v in p:
                out[v] = i
        return out

    def as_lists(self) -> list[list[int]]:
        return [sorted(p) for p in self.parts]


Clustering = Partition


@dataclass(frozen=True, eq=False)
class Measure:
    """Nonnegative per-vertex weights summing to one."""

    eta: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        eta = np.asarray(self.eta, dtype=float)
        if eta.ndim != 1 or np.any(eta < 0) or not np.all(np.isfinite(eta)):
            raise ValueError("measure must be a finite nonnegative vector")
        if abs(eta.sum() - 1.0) > 1e-12:
            raise ValueError(f"measure sums to {eta.sum()!r}, expected 1")
        object.__setattr__(self, "eta", eta)

    @classmethod
    def uniform(cls, n: int) -> Measure:
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def normalized(cls, weights: Sequence[float]) -> Measure:
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if total <= 0:
            raise ValueError("cannot normalize an all-zero weight vector")
        return cls(w / total)

    def __len__(self) -> int:
        return len(self.eta)

    def __getitem__(self, v: int) -> float:
        return float(self.eta[v])

    def mass(self, vertices: Iterable[int]) -> float:
        idx = list(vertices)
        return float(self.eta[idx].sum()) if idx else 0.0


SetFamily = list  # list[frozenset[int]]; members may overlap or repeat


def _indicator(n: int, s: Iterable[int]) -> np.ndarray:
    x = np.zeros(n)
    idx = list(s)
    if idx:
        x[idx] = 1.0
    return x


def set_cost(g: SignedGraph, s: Iterable[int]) -> float:
    """Disagreement of ``s`` taken as one cluster against the rest of the graph."""
    x = _indicator(g.n, s)
    inside_neg = 0.5 * float(x @ g.negative_matrix @ x)
    cut_pos = float(x @ g.positive_matrix @ (1.0 - x))
    return inside_neg + cut_pos


def cluster_cost(g: SignedGraph, c: Partition, i: int) -> float:
    if not 0 <= i < len(c.parts):
        raise IndexError(f"part index {i} out of range for {len(c.parts)} parts")
    return set_cost(g, c.parts[i])


def max_disagreement(g: SignedGraph, c: Partition) -> float:
    if not c.parts:
        return 0.0
    return max(set_cost(g, p) for p in c.parts)


def boundary(mc: MulticutInstance, s: Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in ``s``."""
    x = _indicator(mc.n, s)
    return float(x @ mc.weight_matrix @ (1.0 - x))


def vio(mc: MulticutInstance, s: Iterable[int]) -> int:
    """Number of source-sink pairs with both endpoints in ``s``."""
    s = set(s)
    return sum(1 for a, b in mc.pairs if a in s and b in s)


def max_demand(mc: MulticutInstance) -> int:
    if not mc.pairs:
        return 0
    counts = [0] * mc.n
    for a, b in mc.pairs:
        counts[a] += 1
        counts[b] += 1
    return max(counts)


def validate_partition(n: int, parts: Iterable[Iterable[int]]) -> list[str]:
    """Return human-readable problems with ``parts`` as a partition of ``range(n)``."""
    errors = []
    owner: dict[int, int] = {}
    for i, part in enumerate(parts):
        members = list(part)
        if not members:
            errors.append(f"part {i} is empty")
        for v in members:
            if not isinstance(v, (int, np.integer)) or not 0 <= v < n:
                errors.append(f"vertex {v!r} in part {i} out of range for n={n}")
            elif v in owner:
                errors.append(f"duplicate vertex {v} in parts {owner[v]} and {i}")
            else:
                owner[v] = i
    missing = [v for v in range(n) if v not in owner]
    if missing:
        errors.append(f"missing vertices {missing}")
    return errors


def separates_all_pairs(mc: MulticutInstance, p: Partition) -> bool:
    labels = p.labels(mc.n)
    return all(labels[a] != labels[b] for a, b in mc.pairs)

"""Correlation clustering to multicut, and the two solution mappings between them.

Each negative edge ``(u, v)`` becomes a fresh vertex ``uv`` joined to ``u``
with the edge's weight, plus the terminal pair ``(v, uv)``.  Positive edges
are copied unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    POSITIVE,
    MulticutInstance,
    Partition,
    PartitionError,
    SignedGraph,
    validate_partition,
)


@dataclass(frozen=True)
class ReductionMap:
    original_n: int
    added: dict[tuple[int, int], int]  # negative edge (u, v) -> new vertex id
    pairs: tuple[tuple[int, int], ...]  # (v, uv), one per negative edge

    @property
    def new_n(self) -> int:
        return self.original_n + len(self.added)


def cc_to_multicut(g: SignedGraph) -> tuple[MulticutInstance, ReductionMap]:
    edges = []
    pairs = []
    added: dict[tuple[int, int], int] = {}
    for e in g.edges:
        if e.sign == POSITIVE:
            edges.append((e.u, e.v, e.weight))
            continue
        uv = g.n + len(added)
        added[(e.u, e.v)] = uv
        edges.append((e.u, uv, e.weight))
        pairs.append((e.v, uv))
    mc = MulticutInstance.build(g.n + len(added), edges, pairs)
    return mc, ReductionMap(g.n, added, tuple(pairs))


def partition_to_clustering(rm: ReductionMap, p: Partition) -> Partition:
    """Restrict a partition of the reduced graph to the original vertices."""
    errors = validate_partition(rm.new_n, p.parts)
    if errors:
        raise PartitionError(errors)
    parts = [frozenset(v for v in part if v < rm.original_n) for part in p.parts]
    return Partition(tuple(s for s in parts if s))


def clustering_to_partition(g: SignedGraph, rm: ReductionMap, c: Partition) -> Partition:
    """Lift a clustering to the reduced graph with the same per-part cost.

    A new vertex ``uv`` joins ``u``'s part when ``u`` and ``v`` are in
    different clusters, and stays a singleton otherwise.
    """
    errors = validate_partition(g.n, c.parts)
    if errors:
        raise PartitionError(errors)
    label = c.labels(g.n)
    parts = [set(p) for p in c.parts]
    extra = []
    for (u, v), uv in rm.added.items():
        if label[u] != label[v]:
            parts[label[u]].add(uv)
        else:
            extra.append(frozenset([uv]))
    return Partition(tuple(frozenset(p) for p in parts) + tuple(extra))

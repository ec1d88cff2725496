"""Brute-force exact solvers used as ground truth in tests and benchmarks.

Partitions are enumerated as restricted-growth strings (RGS) in
lexicographic order; subset costs are tabulated once per instance by bitmask.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .graph import COST_TOL, Measure, MulticutInstance, Partition, SignedGraph

MAX_ENUM_N = 13
MAX_EXACT_N = 12
MAX_SUBSET_N = 16
ETA_TOL = 1e-12


class OracleSizeError(ValueError):
    """Instance too large for exhaustive search."""


class OracleInfeasibleError(ValueError):
    """No vertex set or partition satisfies the constraints."""


def _guard(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise OracleSizeError(f"{what} supports n <= {limit}, got n={n}")


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """Every set partition of ``range(n)`` exactly once, in RGS lexicographic order."""
    _guard(n, MAX_ENUM_N, "enumerate_partitions")
    if n == 0:
        yield Partition(())
        return
    a = [0] * n
    while True:
        blocks: list[list[int]] = [[] for _ in range(max(a) + 1)]
        for v, b in enumerate(a):
            blocks[b].append(v)
        yield Partition(tuple(frozenset(b) for b in blocks))
        # next RGS: bump the rightmost position that may still grow
        i = n - 1
        while i > 0 and a[i] > max(a[:i]):
            i -= 1
        if i == 0:
            return
        a[i] += 1
        a[i + 1 :] = [0] * (n - i - 1)


def rgs_array(n: int) -> np.ndarray:
    """All restricted-growth strings of length ``n`` as rows, lexicographic order."""
    _guard(n, MAX_EXACT_N, "rgs_array")
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        fan = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(len(rows)), fan)
        starts = np.cumsum(fan) - fan
        label = (np.arange(len(parent)) - np.repeat(starts, fan)).astype(np.int8)
        rows = np.column_stack([rows[parent], label])
        top = np.maximum(top[parent], label)
    return rows


def _subsets(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def subset_cc_costs(g: SignedGraph) -> np.ndarray:
    """``cost[mask]`` = disagreement of the vertex set encoded by ``mask``."""
    x = _subsets(g.n)
    inside = 0.5 * np.einsum("ij,ij->i", x @ g.negative_matrix, x)
    cut = np.einsum("ij,ij->i", x @ g.positive_matrix, 1.0 - x)
    return inside + cut


def subset_boundaries(mc: MulticutInstance) -> np.ndarray:
    x = _subsets(mc.n)
    return np.einsum("ij,ij->i", x @ mc.weight_matrix, 1.0 - x)


def subset_violations(mc: MulticutInstance) -> np.ndarray:
    masks = np.arange(1 << mc.n, dtype=np.int64)
    out = np.zeros(1 << mc.n, dtype=np.int64)
    for s, t in mc.pairs:
        both = (1 << s) | (1 << t)
        out += (masks & both) == both
    return out


def _block_masks(rows: np.ndarray) -> np.ndarray:
    n = rows.shape[1]
    weights = np.int64(1) << np.arange(n, dtype=np.int64)
    return np.stack([((rows == b) * weights).sum(axis=1) for b in range(n)], axis=1)


def _best_partition(n: int, cost: np.ndarray) -> tuple[float, Partition]:
    if n == 0:
        return 0.0, Partition(())
    rows = rgs_array(n)
    table = np.append(cost, 0.0)
    masks = _block_masks(rows)
    # empty blocks map to mask 0; send them to the trailing 0.0 slot
    masks[masks == 0] = len(cost)
    values = table[masks].max(axis=1)
    opt = float(values.min())
    if not np.isfinite(opt):
        raise OracleInfeasibleError("no partition satisfies the constraints")
    i = int(np.argmax(values <= opt + COST_TOL))
    a = rows[i]
    parts = tuple(frozenset(np.flatnonzero(a == b).tolist()) for b in range(int(a.max()) + 1))
    return float(values[i]), Partition(parts)


def exact_cc(g: SignedGraph) -> tuple[float, Partition]:
    """Minimum over all clusterings of the largest cluster disagreement.

    Ties go to the lexicographically first restricted-growth string.
    """
    _guard(g.n, MAX_EXACT_N, "exact_cc")
    return _best_partition(g.n, subset_cc_costs(g))


def exact_multicut(mc: MulticutInstance) -> tuple[float, Partition]:
    """Minimum over pair-separating partitions of the largest part boundary."""
    _guard(mc.n, MAX_EXACT_N, "exact_multicut")
    cost = subset_boundaries(mc)
    cost[subset_violations(mc) > 0] = np.inf
    return _best_partition(mc.n, cost)


def _mask_set(mask: int) -> frozenset[int]:
    return frozenset(v for v in range(mask.bit_length()) if mask >> v & 1)


def _subset_mass(eta: Measure, n: int) -> np.ndarray:
    if len(eta) != n:
        raise ValueError(f"measure has {len(eta)} entries for n={n}")
    return _subsets(n) @ eta.eta


def _pick(cost: np.ndarray, ok: np.ndarray) -> tuple[float, frozenset[int]]:
    ok = ok.copy()
    ok[0] = False
    if not ok.any():
        raise OracleInfeasibleError("no vertex set meets the measure constraint")
    vals = np.where(ok, cost, np.inf)
    best = float(vals.min())
    mask = int(np.argmax(vals <= best + COST_TOL))
    return float(cost[mask]), _mask_set(mask)


def exact_cluster(g: SignedGraph, eta: Measure, H: float) -> tuple[float, frozenset[int]]:
    """Cheapest nonempty single cluster with measure at least ``H`` (ties: smallest mask)."""
    _guard(g.n, MAX_SUBSET_N, "exact_cluster")
    mass = _subset_mass(eta, g.n)
    return _pick(subset_cc_costs(g), mass >= H - ETA_TOL)


def exact_mc_cluster(
    mc: MulticutInstance, eta: Measure, H: float
) -> tuple[float, frozenset[int]]:
    """Smallest boundary over pair-free sets with measure in ``[H, 2H]``."""
    _guard(mc.n, MAX_SUBSET_N, "exact_mc_cluster")
    mass = _subset_mass(eta, mc.n)
    ok = (mass >= H - ETA_TOL) & (mass <= 2 * H + ETA_TOL) & (subset_violations(mc) == 0)
    return _pick(subset_boundaries(mc), ok)

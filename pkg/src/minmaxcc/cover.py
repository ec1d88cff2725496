"""Objective-agnostic covering (multiplicative weights) and covering-to-partition aggregation."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .graph import COST_TOL, Measure, Partition

Finder = Callable[[Measure, float], Sequence[frozenset]]
CostFn = Callable[[frozenset], float]


class FinderContractError(RuntimeError):
    """The set finder stopped making progress, so covering cannot terminate."""


class AggregationError(RuntimeError):
    """Step 2 of aggregation exceeded its iteration cap."""


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic child seed for a ``(seed, key, ...)`` cell."""
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1)[0])


def default_round_cap(n: int, k: int) -> int:
    return math.ceil(17 * k * math.log2(n)) + 1 if n > 1 else 1


@dataclass
class CoveringConfig:
    k: int
    seed: int
    finder: Finder
    cost_fn: CostFn | None = None
    max_rounds: int | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be at least 1")

    @property
    def H(self) -> float:
        return 1.0 / self.k


@dataclass
class CoveringResult:
    family: list[frozenset[int]]
    rounds: int
    round_mass: list[float] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)

    @property
    def min_coverage(self) -> float:
        """Smallest fraction of family members containing any one vertex (1 if empty)."""
        if not self.family:
            return 1.0
        return min(self.counts) / len(self.family)


def _above_threshold(counts: list[int], n: int) -> bool:
    # sum(2**-c) > 1/n, evaluated exactly in integers
    top = max(counts)
    return n * sum(1 << (top - c) for c in counts) > (1 << top)


def covering(n: int, cfg: CoveringConfig) -> CoveringResult:
    """Cover every vertex repeatedly, halving the weight of whatever the finder covers.

    Weights start at 1; the loop runs while their sum exceeds ``1/n``.  Each
    round the finder sees the weights normalised into a measure and the
    threshold ``H = 1/k``.
    """
    cap = cfg.max_rounds if cfg.max_rounds is not None else default_round_cap(n, cfg.k)
    counts = [0] * n
    family: list[frozenset[int]] = []
    masses: list[float] = []
    rounds = 0
    while n > 0 and _above_threshold(counts, n):
        if rounds >= cap:
            raise FinderContractError(
                f"covering exceeded {cap} rounds (k={cfg.k}); "
                f"smallest round mass {min(masses):.3g}, H/4={cfg.H / 4:.3g}"
            )
        y = np.array([2.0 ** -c for c in counts])
        eta = Measure(y / y.sum())
        sets = [frozenset(s) for s in cfg.finder(eta, cfg.H)]
        covered: set[int] = set()
        for s in sets:
            if not s or any(not 0 <= v < n for v in s):
                raise FinderContractError(f"finder returned an invalid set {sorted(s)}")
            covered |= s
        if not covered:
            raise FinderContractError(f"finder covered nothing in round {rounds + 1}")
        masses.append(eta.mass(covered))
        family.extend(sets)
        for v in covered:
            counts[v] += 1
        rounds += 1
    member_counts = [sum(1 for s in family if v in s) for v in range(n)]
    return CoveringResult(family, rounds, masses, member_counts)


def coverage_fraction(family: Sequence[frozenset], v: int) -> float:
    if not family:
        raise ValueError("coverage of an empty family is undefined")
    return sum(1 for s in family if v in s) / len(family)


@dataclass
class AggregateResult:
    partition: Partition
    origins: list[int]
    order: list[int]
    potential: list[float]

    @property
    def iterations(self) -> int:
        return len(self.potential) - 1


def aggregate(
    n: int,
    family: Sequence[frozenset],
    B: float,
    cost_fn: CostFn,
    seed: int = 0,
    *,
    order: Sequence[int] | None = None,
) -> AggregateResult:
    """Turn a covering into a partition whose parts each cost at most ``2B``.

    Step 1 takes the members in a seeded random order (or ``order`` if
    given) and gives each vertex to the first member containing it.  Step 2
    repeatedly finds the first part above ``2B`` and resets it to its whole
    member, removing those vertices from every other part.  Each returned
    part is a subset of the family member it came from (``origins``, indices
    into ``family``).
    """
    family = [frozenset(s) for s in family]
    covered = frozenset().union(*family) if family else frozenset()
    if covered != frozenset(range(n)):
        raise ValueError(f"family leaves vertices {sorted(set(range(n)) - covered)} uncovered")
    if order is None:
        order = list(range(len(family)))
        random.Random(seed).shuffle(order)
    else:
        order = list(order)
        if sorted(order) != list(range(len(family))):
            raise ValueError("order must be a permutation of the family indices")
    members = [family[i] for i in order]
    parts: list[set[int]] = []
    taken: set[int] = set()
    for s in members:
        parts.append(set(s - taken))
        taken |= s

    costs = [cost_fn(frozenset(p)) if p else 0.0 for p in parts]
    potential = [float(sum(costs))]
    limit = 2 * B + COST_TOL
    scale = math.ceil(potential[0] / B) if B > 0 else math.ceil(potential[0]) + 1
    cap = len(members) * 10 * max(1, scale)
    while True:
        bad = next((i for i, p in enumerate(parts) if p and costs[i] > limit), None)
        if bad is None:
            break
        if len(potential) > cap:
            raise AggregationError(
                f"potential not decreasing: {len(potential) - 1} iterations, last {potential[-3:]}"
            )
        s = members[bad]
        for j, p in enumerate(parts):
            if j != bad and p & s:
                p -= s
                costs[j] = cost_fn(frozenset(p)) if p else 0.0
        parts[bad] = set(s)
        costs[bad] = cost_fn(s)
        potential.append(float(sum(costs)))

    keep = [i for i, p in enumerate(parts) if p]
    return AggregateResult(
        Partition(tuple(frozenset(parts[i]) for i in keep)),
        [order[i] for i in keep],
        order,
        potential,
    )

"""Min-max multicut: spreading-metric LP, a heuristic ball separator, and the
covering/aggregation solvers for the plain and terminal-constrained variants.

The separator here is a plain randomized ball-growing rule.  It keeps every
set free of source-sink pairs but carries no approximation guarantee.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import cover
from .graph import (
    COST_TOL,
    Measure,
    MulticutInstance,
    Partition,
    boundary,
    max_demand,
    separates_all_pairs,
    vio,
)
from .lp import LpError, LpProblem, Status, solve, solve_lazy
from .metric import PairIndex

log = logging.getLogger(__name__)

X_TOL = 1e-9
MASS_TOL = 1e-12


class McInfeasibleError(ValueError):
    """The multicut LP has no feasible point for the requested threshold."""


class EmptyFamilyError(RuntimeError):
    """The LP solution puts no mass anywhere, so no set can be grown."""


class SeparationError(RuntimeError):
    """A produced partition leaves a source-sink pair together (internal bug)."""


class CapacityError(RuntimeError):
    """Too many terminal-free parts are left over to attach within the cap."""

    def __init__(self, leftovers: int, terminal_parts: int, cap: int):
        super().__init__(
            f"{leftovers} terminal-free parts exceed capacity "
            f"{cap} x {terminal_parts} terminal parts"
        )
        self.leftovers = leftovers
        self.terminal_parts = terminal_parts
        self.cap = cap


class McLayout:
    """``x(v)``, then ``z(u,v)`` per unordered pair, then ``mu(u,v)`` per ordered pair."""

    def __init__(self, n: int):
        self.n = n
        self.z = PairIndex(n, base=n)
        self.mu0 = n + self.z.size
        self.num_vars = self.mu0 + n * (n - 1)

    def mu(self, u: int, v: int) -> int:
        return self.mu0 + u * (self.n - 1) + (v if v < u else v - 1)


def _base_rows(mc: MulticutInstance, lay: McLayout) -> LpProblem:
    n = mc.n
    p = LpProblem(lay.num_vars)
    for u, v, w in mc.edges:
        p.objective[lay.z(u, v)] += w
    for u in range(n):
        for v in range(u + 1, n):
            k = lay.z(u, v)
            p.add({u: 1.0, v: -1.0, k: -1.0}, "<=", 0.0)
            p.add({v: 1.0, u: -1.0, k: -1.0}, "<=", 0.0)
            p.add({k: 1.0, u: -1.0, v: -1.0}, "<=", 0.0)
    for s, t in mc.pairs:
        k = lay.z(s, t)
        p.add({k: 1.0, s: -1.0}, ">=", 0.0)
        p.add({k: 1.0, t: -1.0}, ">=", 0.0)
    for u in range(n):
        for v in range(n):
            if u != v:
                m = lay.mu(u, v)
                p.add({m: 1.0, u: -1.0}, "<=", 0.0)
                p.add({m: 1.0, lay.z(u, v): -1.0}, "<=", 0.0)
    return p


def _add_measure_rows(p: LpProblem, lay: McLayout, eta: Measure, H: float) -> None:
    n = lay.n
    p.add({v: float(eta[v]) for v in range(n)}, ">=", H)
    for v in range(n):
        if eta[v] > 2 * H:
            p.fix(v, 0.0)
    for u in range(n):
        row = {lay.mu(u, v): float(eta[v]) for v in range(n) if v != u}
        row[u] = row.get(u, 0.0) - (1.0 - 2.0 * H)
        p.add(row, ">=", 0.0)


def build_mc_lp(mc: MulticutInstance, eta: Measure, H: float) -> LpProblem:
    """Spreading-metric LP for one small pair-free set of measure about ``H``.

    Triangle rows on ``z`` are left out; separate them lazily with
    ``McLayout(n).z.separate_triangles``.
    """
    if not 0 < H < 1 + MASS_TOL:
        raise ValueError(f"H must lie in (0, 1], got {H}")
    if len(eta) != mc.n:
        raise ValueError(f"measure has {len(eta)} entries for n={mc.n}")
    lay = McLayout(mc.n)
    p = _base_rows(mc, lay)
    _add_measure_rows(p, lay, eta, H)
    return p


def integral_point(mc: MulticutInstance, s) -> np.ndarray:
    """LP variables of the 0/1 solution for vertex set ``s``."""
    lay = McLayout(mc.n)
    x = np.zeros(lay.num_vars)
    members = sorted(set(s))
    x[members] = 1.0
    for u in range(mc.n):
        for v in range(u + 1, mc.n):
            x[lay.z(u, v)] = abs(x[u] - x[v])
    for u in range(mc.n):
        for v in range(mc.n):
            if u != v:
                x[lay.mu(u, v)] = min(x[u], x[lay.z(u, v)])
    return x


def check_integral_feasible(mc: MulticutInstance, eta: Measure, H: float, s) -> bool:
    """Whether the 0/1 point for ``s`` satisfies every LP row, triangles included."""
    p = build_mc_lp(mc, eta, H)
    point = integral_point(mc, s)
    lay = McLayout(mc.n)
    return p.max_violation(point, lay.z.all_triangles()) <= 1e-9


@dataclass
class McLpSolution:
    x: np.ndarray
    z: np.ndarray
    objective: float
    H: float
    lp_rounds: int = 1


class McModel:
    """Per-instance cache of the measure-independent rows and a triangle cut pool."""

    def __init__(self, mc: MulticutInstance, *, engine: str | None = None):
        self.mc = mc
        self.engine = engine
        self.layout = McLayout(mc.n)
        self._base = _base_rows(mc, self.layout)
        self.pool: dict = {}

    def solve(self, eta: Measure, H: float) -> McLpSolution:
        lay = self.layout
        p = self._base.copy()
        _add_measure_rows(p, lay, eta, H)
        p.constraints.extend(self.pool)
        sol = solve_lazy(p, lay.z.separate_triangles, engine=self.engine)
        for c in sol.added:
            self.pool[c] = None
        if sol.status is Status.INFEASIBLE:
            raise McInfeasibleError(f"multicut LP infeasible at H={H:.6g}")
        if not sol.optimal:
            raise LpError(sol.status, f"multicut LP ended with status {sol.status.value}")
        n = self.mc.n
        return McLpSolution(
            sol.x[:n].copy(), lay.z.matrix(sol.x), sol.objective, H, sol.rounds
        )


def h_grid(eta: Measure, tau: float) -> list[float]:
    """Thresholds ``eta(u) * 2**t`` lying in ``[tau, 1]``, ascending."""
    out = set()
    for e in eta.eta:
        if e <= 0:
            continue
        h = float(e)
        while h < tau - MASS_TOL:
            h *= 2.0
        while h > 1.0 + MASS_TOL:
            h /= 2.0
        while tau - MASS_TOL <= h <= 1.0 + MASS_TOL:
            out.add(min(h, 1.0))
            h *= 2.0
    return sorted(out)


def solve_mc_lp(
    model: McModel, eta: Measure, tau: float, *, grid_only: bool = False
) -> McLpSolution:
    """Solve at ``H = tau``; if infeasible, walk the ``eta(u) * 2**t`` grid upward.

    Heavy vertices (``eta > 2H``) are pinned out, so with concentrated
    measures small ``H`` can be infeasible.  ``H >= 1/2`` always is feasible.
    """
    candidates = h_grid(eta, tau)
    if not grid_only:
        candidates = [tau] + [h for h in candidates if h > tau + MASS_TOL]
    for H in candidates:
        try:
            return model.solve(eta, H)
        except McInfeasibleError:
            continue
    raise McInfeasibleError(f"no feasible threshold in [{tau:.6g}, 1]")


def heuristic_separator(
    sol: McLpSolution, mc: MulticutInstance, eta: Measure, H: float, seed: int
) -> list[frozenset[int]]:
    """Disjoint pair-free balls grown around high-``x`` vertices.

    Centres are taken in order of decreasing ``x`` (ties by id).  Each ball
    holds the unassigned vertices within ``z``-distance ``theta`` of its
    centre, ``theta`` uniform in (0, 1/2).  If a pair lands in one ball the
    endpoint with smaller ``x`` (ties: larger id) is dropped; the centre always
    stays.  Stops once the balls carry measure ``H/4``.
    """
    x = sol.x
    if not np.any(x > X_TOL):
        raise EmptyFamilyError("LP solution has x = 0 everywhere")
    rng = random.Random(seed)
    n = mc.n
    centres = sorted((v for v in range(n) if x[v] > X_TOL), key=lambda v: (-x[v], v))
    assigned: set[int] = set()
    family: list[frozenset[int]] = []
    mass = 0.0
    for c in centres:
        if mass >= H / 4 - MASS_TOL:
            break
        if c in assigned:
            continue
        theta = rng.uniform(0.0, 0.5)
        while theta <= 0.0:
            theta = rng.uniform(0.0, 0.5)
        ball = {v for v in range(n) if v not in assigned and (v == c or sol.z[c, v] <= theta)}
        for s, t in mc.pairs:
            if s in ball and t in ball:
                if s == c:
                    drop = t
                elif t == c:
                    drop = s
                else:
                    drop = min((s, t), key=lambda v: (x[v], -v))
                ball.discard(drop)
        family.append(frozenset(ball))
        assigned |= ball
        mass += eta.mass(ball)
    return family


@dataclass
class McRun:
    k: int
    partition: Partition
    cost: float
    B: float
    rounds: int
    family_size: int
    min_coverage: float
    potential: list[float]
    thresholds: list[float] = field(default_factory=list)
    family: list[frozenset[int]] = field(repr=False, default_factory=list)


@dataclass
class McReport:
    partition: Partition
    cost: float
    best_k: int
    runs: list[McRun]


def _check_parts(mc: MulticutInstance, p: Partition) -> None:
    bad = [sorted(s) for s in p.parts if vio(mc, s)]
    if bad or not separates_all_pairs(mc, p):
        raise SeparationError(f"parts {bad} contain a source-sink pair")


def _mc_covering(
    mc: MulticutInstance,
    model: McModel,
    k: int,
    seed: int,
    *,
    grid_only: bool,
    combine: bool = False,
) -> tuple[cover.CoveringResult, list[float], list[int]]:
    thresholds: list[float] = []
    sizes: list[int] = []

    def finder(eta: Measure, tau: float) -> list[frozenset[int]]:
        sol = solve_mc_lp(model, eta, tau, grid_only=grid_only)
        thresholds.append(sol.H)
        fam = heuristic_separator(sol, mc, eta, sol.H, cover.derive_seed(seed, k, len(thresholds)))
        if combine:
            fam = combine_phase(fam, mc).family
        sizes.append(len(fam))
        return fam

    cfg = cover.CoveringConfig(k=k, seed=seed, finder=finder, cost_fn=lambda s: boundary(mc, s))
    return cover.covering(mc.n, cfg), thresholds, sizes


def solve_multicut(
    mc: MulticutInstance,
    seed: int = 0,
    *,
    k_override: int | None = None,
    engine: str | None = None,
    grid_only: bool = False,
) -> McReport:
    """Sweep ``k``, cover with LP + heuristic balls, aggregate, keep the best partition.

    Ties on the largest part boundary go to the smaller ``k``; a zero-cost
    partition ends the sweep.
    """
    n = mc.n
    if n == 0:
        return McReport(Partition(()), 0.0, 1, [])
    model = McModel(mc, engine=engine)
    ks = [k_override] if k_override is not None else list(range(1, n + 1))
    runs: list[McRun] = []
    best: McRun | None = None
    for k in ks:
        cov, thresholds, _ = _mc_covering(mc, model, k, seed, grid_only=grid_only)
        family = cov.family
        B = max(boundary(mc, s) for s in family)
        agg = cover.aggregate(n, family, B, lambda s: boundary(mc, s), seed=cover.derive_seed(seed, k))
        _check_parts(mc, agg.partition)
        cost = max(boundary(mc, s) for s in agg.partition)
        run = McRun(
            k, agg.partition, cost, B, cov.rounds, len(family), cov.min_coverage,
            agg.potential, thresholds, family,
        )
        log.debug("k=%d cost=%g B=%g rounds=%d", k, cost, B, cov.rounds)
        runs.append(run)
        if best is None or run.cost < best.cost - COST_TOL:
            best = run
        if best.cost <= COST_TOL and k_override is None:
            break
    return McReport(best.partition, best.cost, best.k, runs)


def combine_bound(mc: MulticutInstance) -> float:
    """``sqrt(min(2T, n) * Delta)``, the stated cap on the combined family size."""
    return math.sqrt(min(2 * mc.num_pairs, mc.n) * max_demand(mc))


@dataclass
class CombineResult:
    family: list[frozenset[int]]
    bound: float
    within_bound: bool


def combine_phase(family: Sequence[frozenset], mc: MulticutInstance) -> CombineResult:
    """Merge members pairwise while the union stays free of source-sink pairs.

    The lowest index pair ``(i, j)`` that can merge goes first; ``S_j`` is
    folded into ``S_i``.
    """
    sets = [frozenset(s) for s in family]
    for i, s in enumerate(sets):
        if vio(mc, s):
            raise ValueError(f"member {i} {sorted(s)} already contains a source-sink pair")
    partner: dict[int, set[int]] = {}
    for s, t in mc.pairs:
        partner.setdefault(s, set()).add(t)
        partner.setdefault(t, set()).add(s)

    def clash(a: frozenset, b: frozenset) -> bool:
        return any(partner.get(v, set()) & b for v in a)

    merged = True
    while merged:
        merged = False
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                if not clash(sets[i], sets[j]):
                    sets[i] = sets[i] | sets[j]
                    del sets[j]
                    merged = True
                    break
            if merged:
                break
    bound = combine_bound(mc)
    ok = mc.num_pairs == 0 or len(sets) <= bound + 1e-12
    if not ok:
        log.info("combined family of %d sets exceeds sqrt bound %.4g", len(sets), bound)
    return CombineResult(sets, bound, ok)


@dataclass
class ConstrainedAggregate:
    partition: Partition
    B: float
    B_prime: float
    cap: int
    step2_parts: int
    terminal_parts: int
    merged_nonterminal: int
    potential: list[float]


def aggregate_constrained(
    family: Sequence[frozenset], mc: MulticutInstance, B: float, k: int, seed: int = 0
) -> ConstrainedAggregate:
    """Aggregate, then fold terminal-free parts into parts that hold a terminal.

    After the usual two aggregation steps, terminal-free parts are merged
    pairwise (ascending index) while the union's boundary stays within
    ``B' = max(sum(delta) / (k * sqrt(min(2T, n) * Delta)), 2B)``.  The rest
    are dealt round-robin onto the terminal parts, at most
    ``ceil(2 * sqrt(min(2T, n) * Delta))`` each.
    """
    n = mc.n
    cost = lambda s: boundary(mc, s)  # noqa: E731
    agg = cover.aggregate(n, family, B, cost, seed=seed)
    parts = [set(p) for p in agg.partition.parts]
    if mc.num_pairs == 0:
        return ConstrainedAggregate(
            Partition((frozenset(range(n)),)) if n else Partition(()),
            B, 2 * B, 0, len(parts), 0, 0, agg.potential,
        )
    root = combine_bound(mc)
    total = sum(cost(p) for p in parts)
    b_prime = max(total / (k * root), 2 * B)
    terms = mc.terminals
    term_parts = [p for p in parts if p & terms]
    free = [p for p in parts if not p & terms]

    merges = 0
    merged = True
    while merged:
        merged = False
        for i in range(len(free)):
            for j in range(i + 1, len(free)):
                if cost(free[i] | free[j]) <= b_prime + COST_TOL:
                    free[i] = free[i] | free[j]
                    del free[j]
                    merges += 1
                    merged = True
                    break
            if merged:
                break

    cap = math.ceil(2 * root)
    if len(free) > cap * len(term_parts):
        raise CapacityError(len(free), len(term_parts), cap)
    out = [set(p) for p in term_parts]
    for i, p in enumerate(free):
        out[i % len(out)] |= p
    part = Partition(tuple(frozenset(p) for p in out))
    _check_parts(mc, part)
    return ConstrainedAggregate(part, B, b_prime, cap, len(parts), len(term_parts), merges, agg.potential)


@dataclass
class ConstrainedReport:
    partition: Partition
    cost: float
    k: int
    B: float
    B_prime: float
    rounds: int
    combined_sizes: list[int]
    bound: float
    min_coverage: float


def solve_constrained_multicut(
    mc: MulticutInstance,
    k: int,
    seed: int = 0,
    *,
    engine: str | None = None,
    grid_only: bool = False,
) -> ConstrainedReport:
    """Pair-separating partition in which every part holds at least one terminal."""
    n = mc.n
    if k < 1:
        raise ValueError("k must be at least 1")
    if n == 0:
        return ConstrainedReport(Partition(()), 0.0, k, 0.0, 0.0, 0, [], 0.0, 1.0)
    if mc.num_pairs == 0:
        whole = Partition((frozenset(range(n)),))
        return ConstrainedReport(whole, 0.0, k, 0.0, 0.0, 0, [], 0.0, 1.0)
    model = McModel(mc, engine=engine)
    cov, _, sizes = _mc_covering(mc, model, k, seed, grid_only=grid_only, combine=True)
    B = max(boundary(mc, s) for s in cov.family)
    agg = aggregate_constrained(cov.family, mc, B, k, seed=cover.derive_seed(seed, k))
    cost = max(boundary(mc, s) for s in agg.partition)
    return ConstrainedReport(
        agg.partition, cost, k, B, agg.B_prime, cov.rounds, sizes, combine_bound(mc), cov.min_coverage
    )


def pair_cut_bound(mc: MulticutInstance, *, engine: str | None = None) -> float:
    """Largest minimum ``s``-``t`` cut over the pairs; a lower bound on the optimum.

    The part holding ``s`` excludes ``t``, so its boundary is an ``s``-``t``
    cut.  Each cut value comes from the (integral) potential LP.
    """
    best = 0.0
    n, m = mc.n, len(mc.edges)
    for s, t in mc.pairs:
        p = LpProblem(n + m)
        for k, (u, v, w) in enumerate(mc.edges):
            p.objective[n + k] = w
            p.add({n + k: 1.0, u: -1.0, v: 1.0}, ">=", 0.0)
            p.add({n + k: 1.0, v: -1.0, u: 1.0}, ">=", 0.0)
        p.fix(s, 0.0)
        p.fix(t, 1.0)
        sol = solve(p, engine=engine)
        if not sol.optimal:
            raise LpError(sol.status, "s-t cut LP failed")
        best = max(best, sol.objective)
    return best

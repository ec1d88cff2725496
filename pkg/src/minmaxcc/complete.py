"""Min-max correlation clustering on unit-weight complete graphs.

One LP is solved per guessed vertex (pinned into the fractional cluster).
The cheapest guesses whose measure reaches ``H`` are rounded with a radius
2/7 ball; the resulting sets feed the covering/aggregation machinery in
:mod:`minmaxcc.cover`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import cover
from .graph import (
    NEGATIVE,
    GraphError,
    Measure,
    Partition,
    SignedGraph,
    max_disagreement,
    set_cost,
)
from .lp import LpError, LpProblem, Status, solve_lazy
from .metric import PairIndex

log = logging.getLogger(__name__)

BALL_RADIUS = 2.0 / 7.0
ROUND_TOL = 1e-9
MASS_TOL = 1e-12


class InvalidThresholdError(ValueError):
    """The measure threshold ``H`` cannot be met by any vertex set."""


class CcLayout:
    """Variable offsets: ``x(v)``, then ``d(u,v)`` per pair, then ``m`` per negative edge."""

    def __init__(self, g: SignedGraph):
        self.n = g.n
        self.d = PairIndex(g.n, base=g.n)
        self.neg = [(e.u, e.v) for e in g.edges if e.sign == NEGATIVE]
        self.m0 = g.n + self.d.size
        self.num_vars = self.m0 + len(self.neg)

    def x(self, v: int) -> int:
        return v

    def m(self, k: int) -> int:
        return self.m0 + k


def build_cc_lp(
    g: SignedGraph, eta: Measure, H: float, guess: int, *, nonnegative_terms: bool = True
) -> LpProblem:
    """LP relaxation of the best-cluster problem with ``x(guess)`` pinned to 1.

    With ``nonnegative_terms`` (the default) each negative edge also gets
    ``m(u,v) >= d(u,v)``.  Every integral solution satisfies it, since
    ``max(x(u), x(v)) >= |x(u) - x(v)| = d(u,v)`` there, but without it a
    fractional optimum can drive a negative edge's term below zero and the
    ball rounding loses its factor-7 guarantee.

    Triangle inequalities on ``d`` are *not* included; pass
    ``CcLayout(g).d.separate_triangles`` to :func:`minmaxcc.lp.solve_lazy`.
    """
    if not g.complete_flag:
        raise GraphError("the complete-graph pipeline needs a unit-weight complete graph")
    if not 0 <= guess < g.n:
        raise IndexError(f"guess {guess} out of range")
    lay = CcLayout(g)
    p = LpProblem(lay.num_vars)
    for e in g.edges:
        k = lay.d(e.u, e.v)
        if e.sign == NEGATIVE:
            p.objective[k] -= e.weight
        else:
            p.objective[k] += e.weight
    for k, (u, v) in enumerate(lay.neg):
        p.objective[lay.m(k)] += 1.0
        p.add({lay.m(k): 1.0, u: -1.0}, ">=", 0.0)
        p.add({lay.m(k): 1.0, v: -1.0}, ">=", 0.0)
        if nonnegative_terms:
            p.add({lay.m(k): 1.0, lay.d(u, v): -1.0}, ">=", 0.0)
    n = g.n
    for u in range(n):
        for v in range(u + 1, n):
            k = lay.d(u, v)
            p.add({u: 1.0, v: -1.0, k: -1.0}, "<=", 0.0)
            p.add({v: 1.0, u: -1.0, k: -1.0}, "<=", 0.0)
            p.add({k: 1.0, u: -1.0, v: -1.0}, "<=", 0.0)
            p.add({u: 1.0, v: 1.0, k: 1.0}, "<=", 2.0)
    p.add({v: float(eta[v]) for v in range(n)}, ">=", H)
    p.fix(guess, 1.0)
    return p


@dataclass
class GuessSolution:
    guess: int
    objective: float
    x: np.ndarray
    d: np.ndarray
    m: np.ndarray
    lp_rounds: int = 1


class CcModel:
    """Per-graph LP cache: the guess-independent rows plus a pool of triangle cuts.

    Triangle rows are valid for every guess, measure and threshold, so cuts
    found for one solve are handed to the next.  This keeps most solves to a
    single separation round.
    """

    def __init__(
        self, g: SignedGraph, *, engine: str | None = None, nonnegative_terms: bool = True
    ):
        if not g.complete_flag:
            raise GraphError("the complete-graph pipeline needs a unit-weight complete graph")
        self.g = g
        self.engine = engine
        self.layout = CcLayout(g)
        base = build_cc_lp(
            g, Measure.uniform(g.n), 0.0, 0, nonnegative_terms=nonnegative_terms
        ) if g.n else None
        if base is not None:
            # drop the measure row and the pinned guess; both are set per solve
            base.constraints.pop()
            base.lower[0], base.upper[0] = 0.0, 1.0
        self._base = base
        self.pool: dict = {}

    def solve(self, eta: Measure, H: float, guess: int) -> GuessSolution:
        g, lay = self.g, self.layout
        if not 0 <= guess < g.n:
            raise IndexError(f"guess {guess} out of range")
        if float(eta.eta.sum()) < H - MASS_TOL:
            raise InvalidThresholdError(f"H={H} exceeds total measure {eta.eta.sum()}")
        p = self._base.copy()
        p.add({v: float(eta[v]) for v in range(g.n)}, ">=", H)
        p.fix(guess, 1.0)
        p.constraints.extend(self.pool)
        sol = solve_lazy(p, lay.d.separate_triangles, engine=self.engine)
        for c in sol.added:
            self.pool[c] = None
        if sol.status is Status.INFEASIBLE:
            raise InvalidThresholdError(f"LP infeasible for H={H}")
        if not sol.optimal:
            raise LpError(sol.status, f"guess {guess}: LP ended with status {sol.status.value}")
        x = sol.x[: g.n].copy()
        d = lay.d.matrix(sol.x)
        m = sol.x[lay.m0 :].copy()
        return GuessSolution(guess, sol.objective, x, d, m, sol.rounds)


def solve_guess(
    g: SignedGraph,
    eta: Measure,
    H: float,
    guess: int,
    *,
    engine: str | None = None,
    model: CcModel | None = None,
) -> GuessSolution:
    model = model or CcModel(g, engine=engine)
    return model.solve(eta, H, guess)


@dataclass
class GammaSelection:
    order: list[int]
    objectives: list[float]
    lam: int  # 1-based, as in "u_1 .. u_lambda"

    @property
    def gamma(self) -> list[int]:
        return self.order[: self.lam]


def select_gamma(solutions: list[GuessSolution], eta: Measure, H: float) -> GammaSelection:
    """Sort guesses by LP value (ties by vertex id) and take the shortest prefix of mass >= H."""
    # objectives rounded to 1e-9 so solver noise cannot reorder equal values
    ranked = sorted(solutions, key=lambda s: (round(s.objective, 9), s.guess))
    total = 0.0
    for i, s in enumerate(ranked, start=1):
        total += eta[s.guess]
        if total >= H - MASS_TOL:
            return GammaSelection(
                [s.guess for s in ranked], [s.objective for s in ranked], i
            )
    raise InvalidThresholdError(f"guesses carry total measure {total} < H={H}")


def round_ball(sol: GuessSolution) -> frozenset[int]:
    """Radius-2/7 ball around the guess, or the guess alone if the ball is too spread."""
    u = sol.guess
    dist = sol.d[u]
    ball = [w for w in range(len(dist)) if w != u and dist[w] <= BALL_RADIUS + ROUND_TOL]
    spread = float(sum(dist[w] for w in ball))
    if spread >= len(ball) / 7.0 - ROUND_TOL:
        return frozenset([u])
    return frozenset([u, *ball])


@dataclass
class GuessRecord:
    """One LP solve and the ball it rounds to (kept for bound auditing)."""

    guess: int
    objective: float
    ball: frozenset[int]
    ball_cost: float
    in_gamma: bool
    rank: int


@dataclass
class FamilyResult:
    family: list[frozenset[int]]
    selection: GammaSelection
    records: list[GuessRecord]
    eta: np.ndarray
    H: float


def find_cluster_family(
    g: SignedGraph,
    eta: Measure,
    H: float,
    *,
    engine: str | None = None,
    model: CcModel | None = None,
) -> FamilyResult:
    model = model or CcModel(g, engine=engine)
    sols = [model.solve(eta, H, u) for u in range(g.n)]
    sel = select_gamma(sols, eta, H)
    rank = {u: i for i, u in enumerate(sel.order, start=1)}
    gamma = set(sel.gamma)
    records = []
    for s in sols:
        ball = round_ball(s)
        records.append(
            GuessRecord(s.guess, s.objective, ball, set_cost(g, ball), s.guess in gamma, rank[s.guess])
        )
    by_guess = {r.guess: r for r in records}
    family = [by_guess[u].ball for u in sel.gamma]
    return FamilyResult(family, sel, records, eta.eta.copy(), H)


@dataclass
class KRun:
    k: int
    partition: Partition
    cost: float
    B: float
    rounds: int
    family_size: int
    min_coverage: float
    potential: list[float]
    families: list[FamilyResult] = field(repr=False, default_factory=list)


@dataclass
class CcReport:
    partition: Partition
    cost: float
    best_k: int
    runs: list[KRun]


def solve_cc_complete(
    g: SignedGraph,
    seed: int = 0,
    k_override: int | None = None,
    *,
    engine: str | None = None,
    keep_families: bool = False,
) -> CcReport:
    """Cluster a complete signed graph, sweeping the guessed cluster count ``k``.

    For each ``k`` the covering runs with ``H = 1/k``, the family is aggregated
    with ``B`` equal to its costliest member, and the partition with the
    smallest maximum disagreement over all ``k`` is returned (ties: smaller
    ``k``).  A zero-cost partition ends the sweep early since nothing can beat
    it.
    """
    if not g.complete_flag:
        raise GraphError("the complete-graph pipeline needs a unit-weight complete graph")
    n = g.n
    if n == 0:
        return CcReport(Partition(()), 0.0, 1, [])
    ks = [k_override] if k_override is not None else list(range(1, n + 1))
    cost_fn = lambda s: set_cost(g, s)  # noqa: E731
    model = CcModel(g, engine=engine)
    runs: list[KRun] = []
    best: KRun | None = None
    for k in ks:
        results: list[FamilyResult] = []

        def finder(eta: Measure, H: float) -> list[frozenset[int]]:
            res = find_cluster_family(g, eta, H, model=model)
            results.append(res)
            return res.family

        cfg = cover.CoveringConfig(k=k, seed=seed, finder=finder, cost_fn=cost_fn)
        cov = cover.covering(n, cfg)
        family = cov.family if cov.family else [frozenset(range(n))]
        B = max(cost_fn(s) for s in family)
        agg = cover.aggregate(n, family, B, cost_fn, seed=cover.derive_seed(seed, k))
        run = KRun(
            k,
            agg.partition,
            max_disagreement(g, agg.partition),
            B,
            cov.rounds,
            len(cov.family),
            cov.min_coverage,
            agg.potential,
            results if keep_families else [],
        )
        log.debug("k=%d cost=%g B=%g rounds=%d", k, run.cost, B, cov.rounds)
        runs.append(run)
        if best is None or run.cost < best.cost - 1e-9:
            best = run
        if best.cost <= 1e-9 and k_override is None:
            break
    return CcReport(best.partition, best.cost, best.k, runs)


def lp_lower_bound(g: SignedGraph, *, engine: str | None = None) -> float:
    """Largest per-guess LP value at uniform measure and ``H = 1/n``.

    Every nonempty set meets that threshold, so for each vertex the optimal
    clustering's cluster through it is feasible for its guess LP.  Hence
    each value, and their maximum, is at most the optimum.
    """
    if g.n == 0:
        return 0.0
    model = CcModel(g, engine=engine)
    eta = Measure.uniform(g.n)
    return max(model.solve(eta, 1.0 / g.n, u).objective for u in range(g.n))

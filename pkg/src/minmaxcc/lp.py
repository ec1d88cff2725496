"""Bounded-variable linear programming with lazy constraint generation.

Every problem is a minimisation with finite box bounds on each variable and a
list of sparse linear rows.  Two engines implement the same contract:

``"simplex"``
    A dense-tableau primal simplex written here.  Nonbasic variables sit at
    either bound, so the box never becomes explicit rows.  Entering columns
    are chosen by Dantzig's rule; after a run of degenerate pivots the solver
    falls back to Bland's rule, which cannot cycle.

``"highs"``
    The HiGHS solver through its own Python bindings.  Much faster on the
    metric LPs the pipelines generate; used as the default.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
OBJ_TOL = 1e-6
SEPARATION_TOL = 1e-6
MAX_CUTS_PER_ROUND = 500
MAX_SEPARATION_ROUNDS = 200
DEGENERATE_RUN = 20

DEFAULT_ENGINE = "highs"


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    ITERATION_LIMIT = "iteration-limit"


class LpError(RuntimeError):
    """Raised when a caller needs an optimum and the solver could not produce one."""

    def __init__(self, status: Status, message: str = ""):
        super().__init__(message or status.value)
        self.status = status


@dataclass(frozen=True)
class Constraint:
    """``sum(val[k] * x[idx[k]]) <sense> rhs`` with sense one of ``<=``, ``>=``, ``=``."""

    idx: tuple[int, ...]
    val: tuple[float, ...]
    sense: str
    rhs: float

    @classmethod
    def build(
        cls,
        coeffs: Mapping[int, float] | Iterable[tuple[int, float]],
        sense: str,
        rhs: float,
    ) -> Constraint:
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[int, float] = {}
        for i, c in items:
            merged[int(i)] = merged.get(int(i), 0.0) + float(c)
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown relation {sense!r}")
        keys = sorted(k for k, c in merged.items() if c != 0.0)
        return cls(tuple(keys), tuple(merged[k] for k in keys), sense, float(rhs))

    def lhs(self, x: np.ndarray) -> float:
        if not self.idx:
            return 0.0
        return float(np.dot(np.asarray(self.val), x[list(self.idx)]))

    def violation(self, x: np.ndarray) -> float:
        """Amount by which ``x`` violates the row (0 when satisfied)."""
        a = self.lhs(x)
        if self.sense == "<=":
            return max(0.0, a - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - a)
        return abs(a - self.rhs)


@dataclass
class LpProblem:
    num_vars: int
    objective: np.ndarray = None
    lower: np.ndarray = None
    upper: np.ndarray = None
    constraints: list[Constraint] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = self.num_vars
        self.objective = np.zeros(n) if self.objective is None else np.asarray(self.objective, float)
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, float)
        self.upper = np.ones(n) if self.upper is None else np.asarray(self.upper, float)

    def add(self, coeffs, sense: str, rhs: float) -> Constraint:
        c = Constraint.build(coeffs, sense, rhs)
        self.constraints.append(c)
        return c

    def fix(self, var: int, value: float) -> None:
        self.lower[var] = self.upper[var] = value

    def validate(self) -> None:
        n = self.num_vars
        for name, arr in (("objective", self.objective), ("lower", self.lower), ("upper", self.upper)):
            if arr.shape != (n,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({n},)")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("variable bounds must be finite")
        if np.any(self.lower > self.upper):
            bad = int(np.argmax(self.lower > self.upper))
            raise ValueError(f"variable {bad} has lower bound above upper bound")
        for k, c in enumerate(self.constraints):
            if c.idx and (c.idx[0] < 0 or c.idx[-1] >= n):
                raise ValueError(f"constraint {k} references a variable outside 0..{n - 1}")

    def max_violation(self, x: np.ndarray, extra: Iterable[Constraint] = ()) -> float:
        worst = float(max(np.max(self.lower - x, initial=0.0), np.max(x - self.upper, initial=0.0)))
        for c in self.constraints:
            worst = max(worst, c.violation(x))
        for c in extra:
            worst = max(worst, c.violation(x))
        return worst

    def copy(self) -> LpProblem:
        return LpProblem(
            self.num_vars,
            self.objective.copy(),
            self.lower.copy(),
            self.upper.copy(),
            list(self.constraints),
        )

    def dense(self) -> tuple[np.ndarray, list[str], np.ndarray]:
        m = len(self.constraints)
        a = np.zeros((m, self.num_vars))
        b = np.empty(m)
        senses = []
        for r, c in enumerate(self.constraints):
            if c.idx:
                a[r, list(c.idx)] = c.val
            b[r] = c.rhs
            senses.append(c.sense)
        return a, senses, b


@dataclass
class LpSolution:
    status: Status
    x: np.ndarray
    objective: float
    iterations: int = 0
    rounds: int = 1
    added: list[Constraint] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def iteration_cap(p: LpProblem) -> int:
    return 50 * (p.num_vars + len(p.constraints))


def solve(p: LpProblem, *, engine: str | None = None) -> LpSolution:
    p.validate()
    engine = engine or DEFAULT_ENGINE
    if engine == "simplex":
        sol = _TableauSimplex(p).run()
    elif engine == "highs":
        sol = _solve_highs(p)
    else:
        raise ValueError(f"unknown LP engine {engine!r}")
    if sol.optimal:
        sol.x = np.clip(sol.x, p.lower, p.upper)
        sol.objective = float(p.objective @ sol.x)
    return sol


Separator = Callable[[np.ndarray], Sequence[Constraint]]


def solve_lazy(
    p: LpProblem,
    separate: Separator,
    *,
    engine: str | None = None,
    max_rounds: int = MAX_SEPARATION_ROUNDS,
    max_cuts: int = MAX_CUTS_PER_ROUND,
) -> LpSolution:
    """Solve ``p`` while ``separate`` keeps finding violated rows.

    Each round the most violated rows (at most ``max_cuts``, ordered by
    violation and then by their coefficient index tuple) are appended to a
    working copy of ``p``.  ``p`` itself is left untouched; the rows that were
    generated are returned in ``LpSolution.added``.
    """
    work = p.copy()
    added: list[Constraint] = []
    iterations = 0
    for rounds in range(1, max_rounds + 1):
        sol = solve(work, engine=engine)
        iterations += sol.iterations
        if not sol.optimal:
            sol.rounds, sol.iterations, sol.added = rounds, iterations, added
            return sol
        scored = []
        for c in separate(sol.x):
            v = c.violation(sol.x)
            if v > SEPARATION_TOL:
                scored.append((-v, c.idx, c.val, c.sense, c))
        if not scored:
            sol.rounds, sol.iterations, sol.added = rounds, iterations, added
            return sol
        scored.sort(key=lambda t: t[:4])
        batch = [t[-1] for t in scored[:max_cuts]]
        work.constraints.extend(batch)
        added.extend(batch)
    return LpSolution(Status.ITERATION_LIMIT, sol.x, sol.objective, iterations, max_rounds, added)


def _solve_highs(p: LpProblem) -> LpSolution:
    import highspy

    inf = highspy.kHighsInf
    m = len(p.constraints)
    row_lo = np.empty(m)
    row_hi = np.empty(m)
    start = np.zeros(m + 1, dtype=np.int32)
    index: list[int] = []
    value: list[float] = []
    for r, c in enumerate(p.constraints):
        row_lo[r] = -inf if c.sense == "<=" else c.rhs
        row_hi[r] = inf if c.sense == ">=" else c.rhs
        index.extend(c.idx)
        value.extend(c.val)
        start[r + 1] = len(index)

    model = highspy.HighsLp()
    model.num_col_ = p.num_vars
    model.num_row_ = m
    model.col_cost_ = p.objective
    model.col_lower_ = p.lower
    model.col_upper_ = p.upper
    model.row_lower_ = row_lo
    model.row_upper_ = row_hi
    model.a_matrix_.format_ = highspy.MatrixFormat.kRowwise
    model.a_matrix_.num_col_ = p.num_vars
    model.a_matrix_.num_row_ = m
    model.a_matrix_.start_ = start
    model.a_matrix_.index_ = np.asarray(index, dtype=np.int32)
    model.a_matrix_.value_ = np.asarray(value, dtype=float)

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("primal_feasibility_tolerance", FEAS_TOL * 1e-2)
    h.setOptionValue("simplex_iteration_limit", iteration_cap(p))
    h.passModel(model)
    h.run()
    status = h.getModelStatus()
    nit = int(h.getInfo().simplex_iteration_count)
    if status == highspy.HighsModelStatus.kOptimal:
        x = np.array(h.getSolution().col_value, dtype=float)
        return LpSolution(Status.OPTIMAL, x, float(p.objective @ x), nit)
    if status == highspy.HighsModelStatus.kInfeasible:
        return LpSolution(Status.INFEASIBLE, np.full(p.num_vars, np.nan), math.nan, nit)
    if status == highspy.HighsModelStatus.kIterationLimit:
        return LpSolution(Status.ITERATION_LIMIT, np.full(p.num_vars, np.nan), math.nan, nit)
    raise LpError(Status.INFEASIBLE, f"HiGHS ended with model status {status}")


class _TableauSimplex:
    """Two-phase bounded primal simplex on a dense tableau.

    Columns are ordered ``[shifted structurals | slacks | artificials]``.
    Structural ``x`` is shifted to ``y = x - lower`` so every column has a
    lower bound of zero.
    """

    def __init__(self, p: LpProblem):
        self.p = p
        a, senses, b = p.dense()
        m, n = a.shape
        rhs = b - a @ p.lower
        slack_cols, art_cols = [], []
        basis = np.empty(m, dtype=int)
        n_slack = sum(1 for s in senses if s != "=")
        n_art = sum(1 for s, r in zip(senses, rhs) if s == "=" or (s == "<=") == (r < 0))
        ncols = n + n_slack + n_art
        t = np.zeros((m, ncols))
        t[:, :n] = a
        si, ai = n, n + n_slack
        for r, s in enumerate(senses):
            flip = rhs[r] < 0
            if flip:
                t[r, :n] *= -1.0
                rhs[r] = -rhs[r]
            if s != "=":
                coef = 1.0 if s == "<=" else -1.0
                t[r, si] = -coef if flip else coef
                slack_cols.append(si)
                if t[r, si] > 0:
                    basis[r] = si
                    si += 1
                    continue
                si += 1
            t[r, ai] = 1.0
            basis[r] = ai
            art_cols.append(ai)
            ai += 1
        self.m, self.n, self.ncols = m, n, ncols
        self.t = t
        self.beta = rhs.astype(float)
        self.basis = basis
        # unit columns of the starting basis; their tableau columns hold B^-1
        self.unit_cols = basis.copy()
        self.rhs0 = rhs.astype(float)
        self.a0 = t.copy()
        self.span = np.concatenate([p.upper - p.lower, np.full(ncols - n, np.inf)])
        self.at_upper = np.zeros(ncols, dtype=bool)
        self.movable = np.ones(ncols, dtype=bool)
        self.movable[:n] = self.span[:n] > 0
        self.art = np.zeros(ncols, dtype=bool)
        self.art[art_cols] = True
        self.iterations = 0
        self.cap = iteration_cap(p)

    def _refresh_values(self) -> None:
        """Recompute basic values from scratch to shed accumulated drift."""
        binv = self.t[:, self.unit_cols]
        upper_cols = np.flatnonzero(self.at_upper)
        rhs = self.rhs0.copy()
        if upper_cols.size:
            rhs -= self.a0[:, upper_cols] @ self.span[upper_cols]
        self.beta = binv @ rhs

    def _reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        return cost - cost[self.basis] @ self.t

    def _iterate(self, cost: np.ndarray) -> Status:
        t, beta = self.t, self.beta
        r = self._reduced_costs(cost)
        in_basis = np.zeros(self.ncols, dtype=bool)
        in_basis[self.basis] = True
        degenerate = 0
        while True:
            cand = self.movable & ~in_basis
            inc = cand & ~self.at_upper & (r < -PIVOT_TOL)
            dec = cand & self.at_upper & (r > PIVOT_TOL)
            elig = np.flatnonzero(inc | dec)
            if elig.size == 0:
                return Status.OPTIMAL
            if self.iterations >= self.cap:
                return Status.ITERATION_LIMIT
            self.iterations += 1
            bland = degenerate >= DEGENERATE_RUN
            j = int(elig[0]) if bland else int(elig[np.argmax(np.abs(r[elig]))])
            d = 1.0 if inc[j] else -1.0
            g = d * t[:, j]
            ub_b = self.span[self.basis]
            ratios = np.full(self.m, np.inf)
            hits_upper = np.zeros(self.m, dtype=bool)
            down = g > PIVOT_TOL
            ratios[down] = beta[down] / g[down]
            up = (g < -PIVOT_TOL) & np.isfinite(ub_b)
            ratios[up] = (beta[up] - ub_b[up]) / g[up]
            hits_upper[up] = True
            np.maximum(ratios, 0.0, out=ratios)
            step = float(ratios.min()) if self.m else np.inf
            flip = self.span[j]
            if flip <= step:
                # entering variable reaches its opposite bound before any basic one
                if not np.isfinite(flip):
                    raise LpError(Status.INFEASIBLE, "unbounded direction in bounded LP")
                beta -= g * flip
                self.at_upper[j] = not self.at_upper[j]
                degenerate = 0 if flip > 1e-12 else degenerate + 1
                continue
            ties = np.flatnonzero(ratios <= step + 1e-12)
            row = int(ties[np.argmin(self.basis[ties])]) if ties.size > 1 else int(ties[0])
            leave = int(self.basis[row])
            start = self.span[j] if self.at_upper[j] else 0.0
            beta -= g * step
            beta[row] = start + d * step
            self.at_upper[leave] = bool(hits_upper[row])
            self.at_upper[j] = False
            piv = t[row, j]
            t[row] /= piv
            col = t[:, j].copy()
            col[row] = 0.0
            t -= np.outer(col, t[row])
            r -= r[j] * t[row]
            self.basis[row] = j
            in_basis[leave] = False
            in_basis[j] = True
            degenerate = 0 if step > 1e-12 else degenerate + 1

    def run(self) -> LpSolution:
        p = self.p
        if self.art.any():
            status = self._iterate(self.art.astype(float))
            self._refresh_values()
            if status is not Status.OPTIMAL:
                return self._fail(status)
            infeas = float(self.beta[self.art[self.basis]].sum())
            if infeas > FEAS_TOL:
                return self._fail(Status.INFEASIBLE)
            self._drive_out_artificials()
            self.movable[self.art] = False
            self.span[self.art] = 0.0
        cost = np.zeros(self.ncols)
        cost[: self.n] = p.objective
        status = self._iterate(cost)
        self._refresh_values()
        if status is not Status.OPTIMAL:
            return self._fail(status)
        y = np.where(self.at_upper[: self.n], self.span[: self.n], 0.0)
        struct = self.basis < self.n
        y[self.basis[struct]] = self.beta[struct]
        x = p.lower + y
        return LpSolution(Status.OPTIMAL, x, float(p.objective @ x), self.iterations)

    def _drive_out_artificials(self) -> None:
        for row in range(self.m):
            if not self.art[self.basis[row]]:
                continue
            in_basis = np.zeros(self.ncols, dtype=bool)
            in_basis[self.basis] = True
            cand = np.flatnonzero(~self.art & ~in_basis & (np.abs(self.t[row]) > PIVOT_TOL))
            if cand.size == 0:
                continue  # redundant row; the artificial stays basic at zero
            j = int(cand[0])
            leave = self.basis[row]
            value = self.span[j] if self.at_upper[j] else 0.0
            self.t[row] /= self.t[row, j]
            col = self.t[:, j].copy()
            col[row] = 0.0
            self.t -= np.outer(col, self.t[row])
            self.basis[row] = j
            self.beta[row] = value
            self.at_upper[j] = False
            self.at_upper[leave] = False

    def _fail(self, status: Status) -> LpSolution:
        return LpSolution(status, np.full(self.n, np.nan), math.nan, self.iterations)

"""Seeded benchmark suites and the CSV report.

Columns: ``index, kind, n, params, instance_seed, max_cost, opt, ratio,
lp_bound`` and, with timing enabled, ``wall_time``.  ``opt`` and ``ratio``
are blank when the instance is too large for the oracle.  Wall time is opt-in
because it would break byte-identical reruns.
"""

from __future__ import annotations

import csv
import io as _io
import time
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import io
from .complete import lp_lower_bound, solve_cc_complete
from .cover import derive_seed
from .graph import MulticutInstance, SignedGraph
from .multicut import pair_cut_bound, solve_multicut
from .oracle import MAX_EXACT_N, exact_cc, exact_multicut

COLUMNS = ["index", "kind", "n", "params", "instance_seed", "max_cost", "opt", "ratio", "lp_bound"]
SUITES = ("small-cc", "small-mc")
DEFAULT_COUNT = {"small-cc": 200, "small-mc": 100}

CC_SIZES = (5, 6, 7, 8)
CC_PROBS = (0.2, 0.5, 0.8)
MC_SHAPES = ((2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 4))


@dataclass(frozen=True)
class Case:
    index: int
    kind: str
    params: str
    seed: int
    instance: SignedGraph | MulticutInstance


def cc_suite(seed: int, count: int = DEFAULT_COUNT["small-cc"]) -> Iterator[Case]:
    """Alternating planted and random-signed complete graphs, n in 5..8.

    ``p`` is the negative-pair probability for random-signed instances; for
    planted ones the flip probability is ``p / 2`` with 2 or 3 clusters.
    """
    for i in range(count):
        s = derive_seed(seed, i)
        rng = np.random.default_rng(s)
        n = int(rng.choice(CC_SIZES))
        p = float(rng.choice(CC_PROBS))
        if i % 2 == 0:
            k = int(rng.integers(2, 4))
            yield Case(i, "planted", f"k={k} flip={p / 2:g}", s, io.gen_planted(n, k, p / 2, s))
        else:
            yield Case(i, "random-signed", f"p={p:g}", s, io.gen_random_signed(n, p, s))


def mc_suite(seed: int, count: int = DEFAULT_COUNT["small-mc"]) -> Iterator[Case]:
    """Unit grids with at most 16 vertices and 1 to 4 terminal pairs."""
    for i in range(count):
        s = derive_seed(seed, i)
        rng = np.random.default_rng(s)
        r, c = MC_SHAPES[int(rng.integers(len(MC_SHAPES)))]
        t = int(rng.integers(1, 5))
        yield Case(i, "grid-mc", f"{r}x{c} T={t}", s, io.gen_grid_mc(r, c, t, s))


def _ratio(cost: float, opt: float) -> float:
    if opt > 0:
        return cost / opt
    return 1.0 if cost <= 1e-9 else float("inf")


def run_case(case: Case, seed: int) -> dict:
    x = case.instance
    if isinstance(x, SignedGraph):
        cost = solve_cc_complete(x, seed=seed).cost
        opt = exact_cc(x)[0] if x.n <= MAX_EXACT_N else None
        bound = lp_lower_bound(x)
    else:
        cost = solve_multicut(x, seed=seed).cost
        opt = exact_multicut(x)[0] if x.n <= MAX_EXACT_N else None
        bound = pair_cut_bound(x)
    return {
        "index": case.index,
        "kind": case.kind,
        "n": x.n,
        "params": case.params,
        "instance_seed": case.seed,
        "max_cost": io.fmt_num(cost),
        "opt": "" if opt is None else io.fmt_num(opt),
        "ratio": "" if opt is None else f"{_ratio(cost, opt):.6f}",
        "lp_bound": f"{bound:.6f}",
    }


def run_bench(suite: str, seed: int, count: int | None = None, *, timing: bool = False) -> str:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    count = DEFAULT_COUNT[suite] if count is None else count
    cases = cc_suite(seed, count) if suite == "small-cc" else mc_suite(seed, count)
    out = _io.StringIO()
    w = csv.DictWriter(out, fieldnames=COLUMNS + (["wall_time"] if timing else []), lineterminator="\n")
    w.writeheader()
    for case in cases:
        t0 = time.perf_counter()
        row = run_case(case, seed)
        if timing:
            row["wall_time"] = f"{time.perf_counter() - t0:.3f}"
        w.writerow(row)
    return out.getvalue()

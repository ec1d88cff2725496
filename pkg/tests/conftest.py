from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from minmaxcc.graph import MulticutInstance, SignedGraph

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def k3_mixed() -> SignedGraph:
    return SignedGraph.from_edges(3, [(0, 1, "+"), (0, 2, "+"), (1, 2, "-")])


def brute_set_cost(g: SignedGraph, s) -> float:
    """Edge-by-edge count, independent of the matrix form used in the package."""
    s = set(s)
    total = 0.0
    for e in g.edges:
        inside = (e.u in s) + (e.v in s)
        if e.sign < 0 and inside == 2:
            total += e.weight
        if e.sign > 0 and inside == 1:
            total += e.weight
    return total


def brute_boundary(mc: MulticutInstance, s) -> float:
    s = set(s)
    return sum(w for u, v, w in mc.edges if (u in s) != (v in s))


@st.composite
def complete_graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    signs = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return SignedGraph.complete(n, [p for p, neg in zip(pairs, signs) if neg])


@st.composite
def signed_graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    edges = [
        (u, v, draw(st.sampled_from("+-")), draw(st.sampled_from([0.5, 1.0, 2.0, 3.0])))
        for u, v in chosen
    ]
    return SignedGraph.from_edges(n, edges)


@st.composite
def multicut_instances(draw, min_n=2, max_n=6, max_pairs=3):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True))
    edges = [(u, v, draw(st.sampled_from([1.0, 2.0, 0.5]))) for u, v in chosen]
    terms = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=max_pairs))
    return MulticutInstance.build(n, edges, terms)


def partitions_of(n: int, rng: np.random.Generator, parts: int | None = None) -> list[list[int]]:
    k = parts or int(rng.integers(1, n + 1))
    labels = rng.integers(0, k, n)
    return [list(np.flatnonzero(labels == b)) for b in range(k) if np.any(labels == b)]


_VERDICTS = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; the terminal summary prints them in order."""
    box = request.config.stash.setdefault(_VERDICTS, {})

    def record(number: int, ok: bool, detail: str, part: str = "") -> bool:
        box[(number, part)] = (ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    box = config.stash.get(_VERDICTS, {})
    if not box:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, part in sorted(box):
        ok, detail = box[(number, part)]
        label = f"{number}{part}"
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {label:<3} {detail}")

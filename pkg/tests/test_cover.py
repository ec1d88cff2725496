from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minmaxcc.cover import (
    AggregationError,
    CoveringConfig,
    FinderContractError,
    aggregate,
    coverage_fraction,
    covering,
    default_round_cap,
    derive_seed,
)
from minmaxcc.graph import MulticutInstance, boundary


def _cfg(k, finder, **kw):
    return CoveringConfig(k=k, seed=0, finder=finder, **kw)


def test_whole_set_finder_runs_log_rounds():
    res = covering(4, _cfg(1, lambda eta, H: [frozenset(range(4))]))
    # y = 2^-t; loop while 4 * 2^-t > 1/4
    assert res.rounds == 4 == math.ceil(math.log2(4**2))
    assert res.family == [frozenset(range(4))] * 4
    assert res.min_coverage == 1.0


def test_single_vertex_means_no_rounds():
    res = covering(1, _cfg(1, lambda eta, H: [frozenset([0])]))
    assert res.rounds == 0 and res.family == []


def test_alternating_max_weight_singletons():
    def finder(eta, H):
        return [frozenset([max(range(len(eta)), key=lambda v: (eta[v], -v))])]

    res = covering(2, _cfg(2, finder))
    # simulate: halve the heavier weight (ties to the lower id) until sum <= 1/2
    y = [1.0, 1.0]
    seq = []
    while sum(y) > 0.5:
        v = max(range(2), key=lambda i: (y[i], -i))
        seq.append(frozenset([v]))
        y[v] /= 2
    assert res.family == seq
    assert [min(s) for s in seq[:4]] == [0, 1, 0, 1]


def test_round_cap_and_empty_finder_raise():
    with pytest.raises(FinderContractError):
        covering(4, _cfg(1, lambda eta, H: []))
    with pytest.raises(FinderContractError):
        covering(4, _cfg(1, lambda eta, H: [frozenset([0])], max_rounds=3))
    with pytest.raises(FinderContractError):
        covering(3, _cfg(1, lambda eta, H: [frozenset([7])]))
    with pytest.raises(ValueError):
        CoveringConfig(k=0, seed=0, finder=lambda e, h: [])


def test_finder_sees_normalised_measure_and_threshold():
    seen = []

    def finder(eta, H):
        seen.append((eta.eta.sum(), H))
        return [frozenset(range(3))]

    covering(3, _cfg(3, finder))
    assert all(s == pytest.approx(1.0) and h == pytest.approx(1 / 3) for s, h in seen)


def test_default_round_cap():
    assert default_round_cap(8, 2) == math.ceil(17 * 2 * 3) + 1
    assert default_round_cap(1, 5) == 1


def test_coverage_fraction():
    assert coverage_fraction([frozenset(range(3))], 1) == 1
    assert coverage_fraction([frozenset([0]), frozenset([1])], 0) == 0.5
    with pytest.raises(ValueError):
        coverage_fraction([], 0)


def test_aggregate_listed_order():
    fam = [frozenset([0, 1]), frozenset([1, 2])]
    res = aggregate(3, fam, B=100.0, cost_fn=len, order=[0, 1])
    assert res.partition.parts == (frozenset([0, 1]), frozenset([2]))
    assert res.iterations == 0


def test_aggregate_single_member_any_seed():
    for seed in range(5):
        res = aggregate(4, [frozenset(range(4))], 4.0, len, seed=seed)
        assert res.partition.parts == (frozenset(range(4)),)


def test_aggregate_path_every_order():
    path = MulticutInstance.build(4, [(0, 1), (1, 2), (2, 3)])
    fam = [frozenset(s) for s in ([0, 1], [1, 2], [2, 3], [0], [3])]
    assert max(boundary(path, s) for s in fam) <= 2
    for order in itertools.permutations(range(5)):
        res = aggregate(4, fam, 2.0, lambda s: boundary(path, s), order=list(order))
        assert all(boundary(path, p) <= 4 + 1e-9 for p in res.partition)
        for part, origin in zip(res.partition.parts, res.origins):
            assert part <= fam[origin]


def test_aggregate_rejects_uncovered_and_bad_order():
    with pytest.raises(ValueError):
        aggregate(3, [frozenset([0, 1])], 1.0, len)
    with pytest.raises(ValueError):
        aggregate(2, [frozenset([0, 1])], 1.0, len, order=[1])


def test_aggregate_cap_raises_when_cost_never_drops():
    # cost function that no split can satisfy: forces endless Step-2 resets
    fam = [frozenset([0, 1]), frozenset([1, 2])]
    with pytest.raises(AggregationError):
        aggregate(3, fam, 0.1, lambda s: 1.0, order=[0, 1])


def test_derive_seed_stable_and_distinct():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert len({derive_seed(1, k) for k in range(50)}) == 50


@st.composite
def covered_families(draw):
    n = draw(st.integers(2, 7))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=12))
    edges = sorted({(min(u, v), max(u, v)) for u, v in edges if u != v})
    fam = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1), min_size=1, max_size=6))
    fam.append(set(range(n)) - set().union(*fam) or {0})
    return MulticutInstance.build(n, edges), [frozenset(s) for s in fam]


@given(covered_families(), st.integers(0, 1000))
def test_aggregate_boundary_invariants(inst, seed):
    mc, fam = inst
    cost = lambda s: boundary(mc, s)  # noqa: E731
    B = max(cost(s) for s in fam) or 1.0
    res = aggregate(mc.n, fam, B, cost, seed=seed)
    assert sorted(v for p in res.partition for v in p) == list(range(mc.n))
    assert all(cost(p) <= 2 * B + 1e-9 for p in res.partition)
    assert all(b < a for a, b in zip(res.potential, res.potential[1:]))
    for part, origin in zip(res.partition.parts, res.origins):
        assert part <= fam[origin]

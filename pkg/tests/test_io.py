from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complete_graphs, multicut_instances, signed_graphs
from minmaxcc.graph import GraphError, Partition, SignedGraph
from minmaxcc.io import (
    FormatError,
    fmt_num,
    gen_grid_mc,
    gen_planted,
    gen_random_signed,
    grid_edges,
    parse_instance,
    parse_mc,
    parse_signed,
    parse_solution,
    planted_labels,
    write_instance,
    write_mc,
    write_signed,
    write_solution,
)
from minmaxcc.oracle import exact_cc


def edge_set(g: SignedGraph):
    return sorted((e.u, e.v, e.sign, e.weight) for e in g.edges)


@given(signed_graphs())
def test_signed_roundtrip(g):
    h = parse_signed(write_signed(g))
    assert h.n == g.n and edge_set(h) == edge_set(g)


@given(complete_graphs())
def test_complete_roundtrip(g):
    text = write_signed(g, complete=True)
    assert text.startswith(f"sgc {g.n}\n")
    h = parse_signed(text)
    assert edge_set(h) == edge_set(g) and h.complete_flag


@given(multicut_instances())
def test_mc_roundtrip(mc):
    back = parse_mc(write_mc(mc))
    assert (back.n, sorted(back.edges), back.pairs) == (mc.n, sorted(mc.edges), mc.pairs)
    assert parse_instance(write_instance(mc)).pairs == mc.pairs


def test_complete_mode_k3():
    for head in ("sgc", "complete"):
        g = parse_signed(f"{head} 3\n1 2\n")
        assert edge_set(g) == [(0, 1, 1, 1.0), (0, 2, 1, 1.0), (1, 2, -1, 1.0)]


def test_comments_and_default_weight():
    g = parse_signed("# a comment\nsg 2 1\n\n0 1 -   # trailing\n")
    assert edge_set(g) == [(0, 1, -1, 1.0)]


@pytest.mark.parametrize(
    "text,line",
    [
        ("sg 3 2\n0 1 +\n0 1 -\n", 3),  # duplicate pair
        ("sg 3 1\n0 5 +\n", 2),  # out of range
        ("sg 3 1\n0 1 *\n", 2),  # bad sign
        ("sg 3 1\n0 1 + -2\n", 2),  # negative weight
        ("sg 3 1\n0 x +\n", 2),
        ("sg 3 2\n0 1 +\n", 2),  # count mismatch reported at the last line
        ("sgc 3\n0 0\n", 2),  # self loop
        ("mc 3 1 1\n0 1 1\n0 0\n", 3),
        ("mc 3 1 1\n0 1\n1 2\n", 2),
        ("graph 3\n", 1),
    ],
)
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(FormatError) as err:
        parse_instance(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_empty_input_rejected():
    with pytest.raises(FormatError):
        parse_instance("# nothing\n")


def test_write_complete_requires_unit_complete_graph():
    with pytest.raises(GraphError):
        write_signed(SignedGraph.from_edges(3, [(0, 1, "+")]), complete=True)


def test_solution_roundtrip():
    p = Partition.of(5, [[4, 2], [0], [1, 3]])
    text = write_solution(p, 2.5)
    assert text == "0\n1 3\n2 4\n# max_cost 2.5\n"
    assert parse_solution(text) == ([[0], [1, 3], [2, 4]], 2.5)
    assert parse_solution("0 1\n")[1] is None
    with pytest.raises(FormatError):
        parse_solution("0 a\n")


def test_fmt_num():
    assert fmt_num(3.0) == "3"
    assert fmt_num(0.1) == "0.1"
    assert float(fmt_num(1 / 3)) == 1 / 3


def test_generators():
    assert exact_cc(gen_planted(6, 2, 0.0, 7))[0] == 0
    labels = planted_labels(6, 2, 7)
    assert sorted(labels) == [0, 0, 0, 1, 1, 1]
    assert gen_random_signed(4, 0.0, 1).negative_edges == []
    assert len(gen_random_signed(4, 1.0, 1).negative_edges) == 6
    mc = gen_grid_mc(2, 2, 1, 3)
    assert sorted((u, v) for u, v, _ in mc.edges) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    assert mc.num_pairs == 1
    assert len(grid_edges(4, 4)) == 24
    with pytest.raises(ValueError):
        gen_grid_mc(2, 2, 7, 0)
    with pytest.raises(ValueError):
        gen_random_signed(3, 1.5, 0)


@given(st.integers(0, 2**31), st.integers(2, 8), st.sampled_from([0.2, 0.5, 0.8]))
def test_generators_are_seeded(seed, n, p):
    assert edge_set(gen_random_signed(n, p, seed)) == edge_set(gen_random_signed(n, p, seed))
    assert edge_set(gen_planted(n, 2, p, seed)) == edge_set(gen_planted(n, 2, p, seed))

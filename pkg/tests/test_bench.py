from __future__ import annotations

import csv
import io

import pytest

from minmaxcc.bench import COLUMNS, cc_suite, mc_suite, run_bench
from minmaxcc.graph import MulticutInstance, SignedGraph


def test_cc_suite_composition():
    cases = list(cc_suite(0, 12))
    assert [c.kind for c in cases[:4]] == ["planted", "random-signed"] * 2
    for c in cases:
        assert isinstance(c.instance, SignedGraph) and c.instance.complete_flag
        assert 5 <= c.instance.n <= 8


def test_mc_suite_composition():
    for c in mc_suite(1, 20):
        mc = c.instance
        assert isinstance(mc, MulticutInstance)
        assert mc.n <= 16 and 1 <= mc.num_pairs <= 4


def test_suites_are_seeded():
    a = [(c.seed, c.params) for c in cc_suite(5, 6)]
    assert a == [(c.seed, c.params) for c in cc_suite(5, 6)]
    assert a != [(c.seed, c.params) for c in cc_suite(6, 6)]


def test_csv_columns_and_ratio():
    rows = list(csv.DictReader(io.StringIO(run_bench("small-cc", 2, 3))))
    assert len(rows) == 3 and list(rows[0]) == COLUMNS
    for r in rows:
        assert float(r["lp_bound"]) <= float(r["opt"]) + 1e-6 <= float(r["max_cost"]) + 1e-6


def test_timing_column_opt_in():
    text = run_bench("small-mc", 0, 1, timing=True)
    assert text.splitlines()[0].endswith(",wall_time")


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_bench("huge", 0)

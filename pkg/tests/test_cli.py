from __future__ import annotations

import subprocess
import sys

import pytest

from minmaxcc.cli import cli_main
from minmaxcc.io import parse_mc, parse_solution


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def test_exact_cc_k3(files, capsys):
    path = files("k3.sg", "sg 3 3\n0 1 +\n0 2 +\n1 2 -\n")
    assert cli_main(["exact", "cc", "--input", path]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "OPT 1"


def test_exact_mc(files, capsys):
    path = files("e.mc", "mc 2 1 1\n0 1 1\n0 1\n")
    assert cli_main(["exact", "mc", "--input", path]) == 0
    assert capsys.readouterr().out == "OPT 1\n0\n1\n"


def test_solve_then_verify(files, tmp_path, capsys):
    inst = files("g.sgc", "sgc 5\n0 1\n1 2\n3 4\n")
    sol = str(tmp_path / "g.sol")
    assert cli_main(["solve", "cc", "--input", inst, "--out", sol, "--seed", "3"]) == 0
    assert capsys.readouterr().out.startswith("max_cost ")
    assert cli_main(["verify", "--instance", inst, "--solution", sol]) == 0
    assert capsys.readouterr().out.startswith("ok max_cost")


def test_solve_general_graph_goes_through_multicut(files, capsys):
    inst = files("g.sg", "sg 4 3\n0 1 + 2\n1 2 -\n2 3 +\n")
    assert cli_main(["solve", "cc", "--input", inst]) == 0
    out = capsys.readouterr().out
    assert "(via multicut)" in out
    parts, declared = parse_solution(out.split("\n", 1)[1])
    assert sorted(v for p in parts for v in p) == [0, 1, 2, 3]


def test_solve_mc_and_constrained(files, capsys):
    inst = files("c.mc", "mc 4 4 2\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 2\n1 3\n")
    assert cli_main(["solve", "mc", "--input", inst]) == 0
    capsys.readouterr()
    assert cli_main(["solve", "mc", "--input", inst, "--constrained"]) == 1
    assert cli_main(["solve", "mc", "--input", inst, "--constrained", "--k", "2"]) == 0


def test_verify_rejects_bad_solutions(files, capsys):
    inst = files("e.mc", "mc 3 1 1\n0 1 1\n0 2\n")
    assert cli_main(["verify", "--instance", inst, "--solution", files("a", "0 1\n")]) == 1
    assert "missing vertices [2]" in capsys.readouterr().err
    assert cli_main(["verify", "--instance", inst, "--solution", files("b", "0 2\n1\n")]) == 1
    assert "source-sink" in capsys.readouterr().err
    wrong = files("c", "0\n1 2\n# max_cost 5\n")
    assert cli_main(["verify", "--instance", inst, "--solution", wrong]) == 1
    assert "declared max_cost 5" in capsys.readouterr().err
    good = files("d", "0\n1 2\n# max_cost 1\n")
    assert cli_main(["verify", "--instance", inst, "--solution", good]) == 0


def test_usage_errors_exit_one(files, capsys):
    assert cli_main([]) == 1
    assert cli_main(["solve", "xx", "--input", "f"]) == 1
    assert cli_main(["exact", "cc", "--input", "/nonexistent/file"]) == 1
    assert cli_main(["exact", "cc", "--input", files("bad", "sg 2 1\n0 9 +\n")]) == 1
    assert "line 2" in capsys.readouterr().err
    assert cli_main(["exact", "mc", "--input", files("k", "sgc 2\n")]) == 1
    assert cli_main(["gen", "planted", "5"]) == 1


def test_size_limit_exits_two(files, capsys):
    path = files("big.sgc", "sgc 13\n")
    assert cli_main(["exact", "cc", "--input", path]) == 2
    assert "n <= 12" in capsys.readouterr().err


def test_gen_and_reduce(tmp_path, capsys):
    g = str(tmp_path / "p.sgc")
    assert cli_main(["gen", "planted", "6", "2", "0", "--seed", "4", "--out", g]) == 0
    assert cli_main(["exact", "cc", "--input", g]) == 0
    assert capsys.readouterr().out.startswith("OPT 0\n")
    m = str(tmp_path / "p.mc")
    assert cli_main(["reduce", "--input", g, "--out", m]) == 0
    mc = parse_mc(open(m).read())
    assert mc.n == 6 + mc.num_pairs
    assert cli_main(["gen", "grid-mc", "2", "2", "1"]) == 0
    assert capsys.readouterr().out.startswith("mc 4 4 1\n")
    assert cli_main(["gen", "random-signed", "4", "0"]) == 0
    assert capsys.readouterr().out == "sgc 4\n"


def test_bench_cli(tmp_path):
    out = tmp_path / "b.csv"
    assert cli_main(["bench", "--suite", "small-cc", "--count", "2", "--csv", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("index,kind,n,") and len(lines) == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "minmaxcc", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "solve" in r.stdout

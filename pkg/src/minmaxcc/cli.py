"""Command-line entry point.

Exit codes: 0 success, 1 usage, parse or verification error, 2 infeasible
instance or exceeded size/iteration limit.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .bench import SUITES, run_bench
from .complete import InvalidThresholdError, solve_cc_complete
from .cover import AggregationError, FinderContractError
from .graph import (
    GraphError,
    MulticutInstance,
    Partition,
    SignedGraph,
    boundary,
    max_disagreement,
    validate_partition,
    vio,
)
from .lp import LpError
from .multicut import (
    CapacityError,
    EmptyFamilyError,
    McInfeasibleError,
    SeparationError,
    solve_constrained_multicut,
    solve_multicut,
)
from .oracle import OracleInfeasibleError, OracleSizeError, exact_cc, exact_multicut
from .reduction import cc_to_multicut, partition_to_clustering

EXIT_OK, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2
COST_CHECK_TOL = 1e-6

LIMIT_ERRORS = (
    OracleSizeError,
    OracleInfeasibleError,
    LpError,
    FinderContractError,
    AggregationError,
    CapacityError,
    McInfeasibleError,
    EmptyFamilyError,
    InvalidThresholdError,
    SeparationError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _load(path: str):
    try:
        return io.read_instance(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except (io.FormatError, GraphError) as e:
        raise UsageError(f"{path}: {e}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _require(x, kind, path: str):
    if not isinstance(x, kind):
        want = "multicut" if kind is MulticutInstance else "signed-graph"
        raise UsageError(f"{path}: expected a {want} instance")
    return x


def cmd_solve(a) -> int:
    x = _load(a.input)
    if a.problem == "cc":
        g = _require(x, SignedGraph, a.input)
        if g.complete_flag:
            rep = solve_cc_complete(g, seed=a.seed, k_override=a.k)
            part, cost = rep.partition, rep.cost
            print(f"max_cost {io.fmt_num(cost)} k {rep.best_k} clusters {len(part)}")
        else:
            mc, rm = cc_to_multicut(g)
            rep = solve_multicut(mc, seed=a.seed, k_override=a.k)
            part = partition_to_clustering(rm, rep.partition)
            cost = max_disagreement(g, part)
            print(f"max_cost {io.fmt_num(cost)} k {rep.best_k} clusters {len(part)} (via multicut)")
    else:
        mc = _require(x, MulticutInstance, a.input)
        if a.constrained:
            if a.k is None:
                raise UsageError("solve mc --constrained needs --k")
            rep = solve_constrained_multicut(mc, a.k, seed=a.seed)
            part, cost = rep.partition, rep.cost
        else:
            rep = solve_multicut(mc, seed=a.seed, k_override=a.k)
            part, cost = rep.partition, rep.cost
        print(f"max_cost {io.fmt_num(cost)} parts {len(part)}")
    _emit(io.write_solution(part, cost), a.out)
    return EXIT_OK


def cmd_exact(a) -> int:
    x = _load(a.input)
    if a.problem == "cc":
        opt, part = exact_cc(_require(x, SignedGraph, a.input))
    else:
        opt, part = exact_multicut(_require(x, MulticutInstance, a.input))
    print(f"OPT {io.fmt_num(opt)}")
    for p in part.canonical().as_lists():
        print(" ".join(map(str, p)))
    return EXIT_OK


def cmd_reduce(a) -> int:
    g = _require(_load(a.input), SignedGraph, a.input)
    mc, rm = cc_to_multicut(g)
    _emit(io.write_mc(mc), a.out)
    return EXIT_OK


def cmd_verify(a) -> int:
    x = _load(a.instance)
    try:
        raw, declared = io.parse_solution(Path(a.solution).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {a.solution}: {e.strerror}") from None
    except io.FormatError as e:
        raise UsageError(f"{a.solution}: {e}") from None
    problems = validate_partition(x.n, raw)
    if not problems:
        part = Partition(tuple(frozenset(p) for p in raw))
        if isinstance(x, MulticutInstance):
            for i, p in enumerate(part.parts):
                if vio(x, p):
                    problems.append(f"part {i} contains {vio(x, p)} source-sink pair(s)")
            cost = max((boundary(x, p) for p in part.parts), default=0.0)
        else:
            cost = max_disagreement(x, part)
        if declared is not None and abs(declared - cost) > COST_CHECK_TOL:
            problems.append(f"declared max_cost {io.fmt_num(declared)} but actual is {io.fmt_num(cost)}")
    if problems:
        for msg in problems:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    print(f"ok max_cost {io.fmt_num(cost)} parts {len(part)}")
    return EXIT_OK


def cmd_gen(a) -> int:
    p = a.params
    try:
        if a.kind == "random-signed":
            n, prob = int(p[0]), float(p[1])
            text = io.write_signed(io.gen_random_signed(n, prob, a.seed), complete=True)
        elif a.kind == "planted":
            n, k, flip = int(p[0]), int(p[1]), float(p[2])
            text = io.write_signed(io.gen_planted(n, k, flip, a.seed), complete=True)
        else:
            r, c, t = int(p[0]), int(p[1]), int(p[2])
            text = io.write_mc(io.gen_grid_mc(r, c, t, a.seed))
    except (IndexError, ValueError) as e:
        raise UsageError(f"gen {a.kind}: bad parameters {p}: {e}") from None
    _emit(text, a.out)
    return EXIT_OK


def cmd_bench(a) -> int:
    text = run_bench(a.suite, a.seed, a.count, timing=a.timing)
    _emit(text, a.csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="minmaxcc", description="Min-max correlation clustering and multicut.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="approximate solver")
    s.add_argument("problem", choices=["cc", "mc"])
    s.add_argument("--input", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--k", type=int, help="fix the guessed part count instead of sweeping")
    s.add_argument("--constrained", action="store_true", help="every part must hold a terminal (mc)")
    s.add_argument("--out", help="solution file (default stdout)")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("exact", help="brute-force optimum (small n)")
    e.add_argument("problem", choices=["cc", "mc"])
    e.add_argument("--input", required=True)
    e.set_defaults(func=cmd_exact)

    r = sub.add_parser("reduce", help="signed graph to multicut instance")
    r.add_argument("--input", required=True)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="check a solution file against an instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--solution", required=True)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("kind", choices=["random-signed", "planted", "grid-mc"])
    g.add_argument("params", nargs="+", help="random-signed: n p | planted: n k flip | grid-mc: rows cols npairs")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run a seeded suite and write CSV")
    b.add_argument("--suite", choices=SUITES, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--count", type=int, help="number of instances (default: full suite)")
    b.add_argument("--csv", help="output file (default stdout)")
    b.add_argument("--timing", action="store_true", help="add a wall_time column")
    b.set_defaults(func=cmd_bench)
    return ap


def cli_main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except LIMIT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_LIMIT


def main() -> None:
    sys.exit(cli_main())

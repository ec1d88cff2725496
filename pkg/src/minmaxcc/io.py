"""Text formats, solution files and instance generators.

Signed graph::

    sg <n> <m>
    <u> <v> <+|-> [w]        (m lines, w defaults to 1)

Complete unit-weight signed graph (listed pairs negative, the rest positive)::

    sgc <n>                  (``complete <n>`` is accepted too)
    <u> <v>

Multicut::

    mc <n> <m> <T>
    <u> <v> <w>              (m lines)
    <s> <t>                  (T lines)

Solutions list one part per line followed by ``# max_cost <value>``.  Blank
lines and ``#`` comments are ignored everywhere; ids are 0-based.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Union

import numpy as np

from .graph import GraphError, MulticutInstance, Partition, SignedGraph

Instance = Union[SignedGraph, MulticutInstance]


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def fmt_num(x: float) -> str:
    """Shortest exact text for ``x``; integral values print without a decimal point."""
    if math.isfinite(x) and x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line.split()))
    return out


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", no) from None


def _float(tok: str, no: int) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise FormatError(f"expected a number, got {tok!r}", no) from None
    if not math.isfinite(x) or x < 0:
        raise FormatError(f"weight must be finite and nonnegative, got {tok}", no)
    return x


def _pair(n: int, u: int, v: int, seen: set, what: str, no: int) -> None:
    if not (0 <= u < n and 0 <= v < n):
        raise FormatError(f"{what} ({u}, {v}) out of range for n={n}", no)
    if u == v:
        raise FormatError(f"self-loop {what} ({u}, {v})", no)
    key = (min(u, v), max(u, v))
    if key in seen:
        raise FormatError(f"duplicate {what} ({u}, {v})", no)
    seen.add(key)


def _count(rows: list, start: int, want: int, what: str, last: int) -> None:
    have = len(rows) - start
    if have != want:
        raise FormatError(f"header declares {want} {what} lines, found {have}", last)


def parse_signed(text: str) -> SignedGraph:
    rows = _lines(text)
    if not rows:
        raise FormatError("empty input")
    no, head = rows[0]
    tag = head[0]
    if tag in ("sgc", "complete"):
        if len(head) != 2:
            raise FormatError(f"expected '{tag} <n>'", no)
        n = _int(head[1], no)
        seen: set = set()
        neg = []
        for no, tok in rows[1:]:
            if len(tok) != 2:
                raise FormatError("expected '<u> <v>'", no)
            u, v = _int(tok[0], no), _int(tok[1], no)
            _pair(n, u, v, seen, "pair", no)
            neg.append((u, v))
        return SignedGraph.complete(n, neg)
    if tag != "sg" or len(head) != 3:
        raise FormatError("expected header 'sg <n> <m>' or 'sgc <n>'", no)
    n, m = _int(head[1], no), _int(head[2], no)
    if n < 0:
        raise FormatError("negative vertex count", no)
    seen = set()
    edges = []
    for no, tok in rows[1:]:
        if len(tok) not in (3, 4):
            raise FormatError("expected '<u> <v> <+|-> [w]'", no)
        u, v = _int(tok[0], no), _int(tok[1], no)
        if tok[2] not in ("+", "-"):
            raise FormatError(f"sign must be '+' or '-', got {tok[2]!r}", no)
        w = _float(tok[3], no) if len(tok) == 4 else 1.0
        _pair(n, u, v, seen, "edge", no)
        edges.append((u, v, tok[2], w))
    _count(rows, 1, m, "edge", rows[-1][0])
    return SignedGraph.from_edges(n, edges)


def write_signed(g: SignedGraph, *, complete: bool = False) -> str:
    if complete:
        if not g.complete_flag:
            raise GraphError("only unit-weight complete graphs have a complete-mode file")
        body = [f"{e.u} {e.v}" for e in g.negative_edges]
        return "\n".join([f"sgc {g.n}", *body]) + "\n"
    lines = [f"sg {g.n} {len(g.edges)}"]
    for e in g.edges:
        sign = "+" if e.sign > 0 else "-"
        w = "" if e.weight == 1.0 else f" {fmt_num(e.weight)}"
        lines.append(f"{e.u} {e.v} {sign}{w}")
    return "\n".join(lines) + "\n"


def parse_mc(text: str) -> MulticutInstance:
    rows = _lines(text)
    if not rows:
        raise FormatError("empty input")
    no, head = rows[0]
    if head[0] != "mc" or len(head) != 4:
        raise FormatError("expected header 'mc <n> <m> <T>'", no)
    n, m, t = (_int(x, no) for x in head[1:])
    if n < 0 or m < 0 or t < 0:
        raise FormatError("header counts must be nonnegative", no)
    _count(rows, 1, m + t, "edge and pair", rows[-1][0])
    seen: set = set()
    edges = []
    for no, tok in rows[1 : 1 + m]:
        if len(tok) != 3:
            raise FormatError("expected '<u> <v> <w>'", no)
        u, v = _int(tok[0], no), _int(tok[1], no)
        _pair(n, u, v, seen, "edge", no)
        edges.append((u, v, _float(tok[2], no)))
    seen = set()
    pairs = []
    for no, tok in rows[1 + m :]:
        if len(tok) != 2:
            raise FormatError("expected '<s> <t>'", no)
        s, t_ = _int(tok[0], no), _int(tok[1], no)
        _pair(n, s, t_, seen, "pair", no)
        pairs.append((s, t_))
    return MulticutInstance.build(n, edges, pairs)


def write_mc(mc: MulticutInstance) -> str:
    lines = [f"mc {mc.n} {len(mc.edges)} {mc.num_pairs}"]
    lines += [f"{u} {v} {fmt_num(w)}" for u, v, w in mc.edges]
    lines += [f"{s} {t}" for s, t in mc.pairs]
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    rows = _lines(text)
    if not rows:
        raise FormatError("empty input")
    return parse_mc(text) if rows[0][1][0] == "mc" else parse_signed(text)


def write_instance(x: Instance) -> str:
    return write_mc(x) if isinstance(x, MulticutInstance) else write_signed(x)


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def write_solution(p: Partition, max_cost: float) -> str:
    lines = [" ".join(map(str, part)) for part in p.canonical().as_lists()]
    lines.append(f"# max_cost {fmt_num(max_cost)}")
    return "\n".join(lines) + "\n"


def parse_solution(text: str) -> tuple[list[list[int]], float | None]:
    """Parts as written (unvalidated) and the declared max cost, if any."""
    parts = []
    declared = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            tok = line[1:].split()
            if len(tok) == 2 and tok[0] == "max_cost":
                try:
                    declared = float(tok[1])
                except ValueError:
                    raise FormatError(f"bad max_cost value {tok[1]!r}", no) from None
            continue
        if line:
            parts.append([_int(t, no) for t in line.split()])
    return parts, declared


def gen_random_signed(n: int, p: float, seed: int) -> SignedGraph:
    """Complete unit-weight graph; each pair is negative with probability ``p``."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    draws = rng.random(len(pairs))
    return SignedGraph.complete(n, [e for e, r in zip(pairs, draws) if r < p])


def planted_labels(n: int, k: int, seed: int) -> list[int]:
    """Ground-truth clusters: a seeded shuffle cut into ``k`` near-equal blocks."""
    if k < 1:
        raise ValueError("k must be at least 1")
    perm = np.random.default_rng([seed, 0]).permutation(n)
    labels = [0] * n
    for pos, v in enumerate(perm):
        labels[int(v)] = pos * k // n
    return labels


def gen_planted(n: int, k: int, flip: float, seed: int) -> SignedGraph:
    """Intra-cluster pairs positive, inter-cluster negative, each sign flipped w.p. ``flip``."""
    if not 0 <= flip <= 1:
        raise ValueError("flip must lie in [0, 1]")
    labels = planted_labels(n, k, seed)
    rng = np.random.default_rng([seed, 1])
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    draws = rng.random(len(pairs))
    neg = [(u, v) for (u, v), r in zip(pairs, draws) if (labels[u] != labels[v]) != (r < flip)]
    return SignedGraph.complete(n, neg)


def grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    out = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                out.append((v, v + 1))
            if i + 1 < rows:
                out.append((v, v + cols))
    return out


def gen_grid_mc(rows: int, cols: int, npairs: int, seed: int) -> MulticutInstance:
    """Unit-weight grid with ``npairs`` distinct random terminal pairs."""
    n = rows * cols
    pool = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if not 0 <= npairs <= len(pool):
        raise ValueError(f"a {rows}x{cols} grid has only {len(pool)} vertex pairs")
    rng = np.random.default_rng(seed)
    pick = sorted(rng.choice(len(pool), size=npairs, replace=False).tolist())
    return MulticutInstance.build(n, [(u, v, 1.0) for u, v in grid_edges(rows, cols)], [pool[i] for i in pick])

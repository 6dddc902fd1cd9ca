"""Graph types, file I/O, generators, and exhaustive reference solvers.

Vertices are 0-based internally; both file formats are 1-based.  Graphs are
validated on construction (simple, undirected, connected, n >= 3) and are
immutable afterwards, so they can be shared freely between threads.

The brute_force_* functions enumerate vertex subsets directly and exist to
check every other component against ground truth on small instances.  They
refuse to run above ``ENUMERATION_GUARD`` vertices.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

# Largest n the exhaustive solvers accept.
ENUMERATION_GUARD = 24

# Generator retry budget for connected G(n,p) samples.
GNP_MAX_RESAMPLES = 1000


class GraphFormatError(ValueError):
    """Malformed graph input (bad syntax, self loop, duplicate, disconnected...)."""


@dataclass(frozen=True)
class VertexSubset:
    """A subset of ``range(n)`` stored as a bitmask.

    The empty and full subsets are representable; operations that need a
    proper nonempty subset (cut values) validate on use.
    """

    n: int
    mask: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("subset needs a positive ground-set size")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError("mask outside ground set")

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "VertexSubset":
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise ValueError(f"vertex {i} outside range(0, {n})")
            if mask >> i & 1:
                raise ValueError(f"vertex {i} listed twice")
            mask |= 1 << i
        return cls(n, mask)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def membership(self) -> tuple[int, ...]:
        """0/1 indicator vector as a tuple."""
        return tuple(self.mask >> i & 1 for i in range(self.n))

    def complement(self) -> "VertexSubset":
        return VertexSubset(self.n, self.mask ^ ((1 << self.n) - 1))

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and bool(self.mask >> v & 1)

    def __iter__(self):
        return iter(self.indices())


@dataclass(frozen=True)
class Graph:
    """Simple connected undirected graph.

    Use :meth:`Graph.build` rather than the raw constructor; it normalises
    the edge list and checks all structural invariants.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adj_masks: tuple[int, ...]

    @classmethod
    def build(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 3:
            raise GraphFormatError(f"need at least 3 vertices, got {n}")
        seen: set[tuple[int, int]] = set()
        masks = [0] * n
        norm: list[tuple[int, int]] = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) outside range(0, {n})")
            if u == v:
                raise GraphFormatError(f"self loop at vertex {u}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise GraphFormatError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        g = cls(n=n, edges=tuple(sorted(norm)), adj_masks=tuple(masks))
        if not g.is_connected():
            raise GraphFormatError("graph is not connected")
        return g

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(mask.bit_count() for mask in self.adj_masks)

    def neighbors(self, v: int) -> tuple[int, ...]:
        mask = self.adj_masks[v]
        return tuple(i for i in range(self.n) if mask >> i & 1)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            v = frontier
            while v:
                low = v & -v
                nxt |= self.adj_masks[low.bit_length() - 1]
                v ^= low
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def laplacian(self) -> np.ndarray:
        """Combinatorial Laplacian L = D - A as a dense float array."""
        a = self.adjacency_matrix()
        return np.diag(a.sum(axis=1)) - a


def laplacian(g: Graph) -> np.ndarray:
    return g.laplacian()


def cut_value(g: Graph, s: VertexSubset) -> int:
    """Number of edges leaving ``s``.

    Requires a proper nonempty subset of the vertex set.
    """
    if s.n != g.n:
        raise ValueError("subset ground set does not match graph")
    if s.size == 0 or s.size == g.n:
        raise ValueError("cut is defined for proper nonempty subsets only")
    inv = ~s.mask
    total = 0
    rem = s.mask
    while rem:
        low = rem & -rem
        total += (g.adj_masks[low.bit_length() - 1] & inv).bit_count()
        rem ^= low
    return total


def expansion(g: Graph, s: VertexSubset) -> Fraction:
    """Cut ratio |cut(S)| / |S| of a subset with 1 <= |S| <= n/2."""
    if not 1 <= s.size <= g.n // 2:
        raise ValueError(f"subset size {s.size} outside [1, {g.n // 2}]")
    return Fraction(cut_value(g, s), s.size)


# ---------------------------------------------------------------------------
# parsing and serialisation

def _tokenize(text: str, skip_comments: str) -> list[tuple[int, list[str]]]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(skip_comments):
            continue
        rows.append((lineno, line.split()))
    return rows


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: bad {what} {tok!r}") from None


def _parse_edge_list(text: str) -> Graph:
    rows = _tokenize(text, "#")
    if not rows:
        raise GraphFormatError("empty input")
    lineno, head = rows[0]
    if len(head) != 2:
        raise GraphFormatError(f"line {lineno}: expected header 'n m'")
    n = _parse_int(head[0], lineno, "vertex count")
    m = _parse_int(head[1], lineno, "edge count")
    edges = []
    for lineno, toks in rows[1:]:
        if len(toks) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'i j'")
        u = _parse_int(toks[0], lineno, "endpoint")
        v = _parse_int(toks[1], lineno, "endpoint")
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"line {lineno}: endpoint outside 1..{n}")
        edges.append((u - 1, v - 1))
    if len(edges) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(edges)}")
    return Graph.build(n, edges)


def _parse_dimacs(text: str) -> Graph:
    n = None
    m = None
    edges = []
    for lineno, toks in _tokenize(text, "c"):
        kind = toks[0]
        if kind == "c":
            continue
        if kind == "p":
            if n is not None:
                raise GraphFormatError(f"line {lineno}: repeated problem line")
            if len(toks) != 4 or toks[1] not in ("edge", "col"):
                raise GraphFormatError(f"line {lineno}: expected 'p edge n m'")
            n = _parse_int(toks[2], lineno, "vertex count")
            m = _parse_int(toks[3], lineno, "edge count")
        elif kind == "e":
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before problem line")
            if len(toks) != 3:
                raise GraphFormatError(f"line {lineno}: expected 'e i j'")
            u = _parse_int(toks[1], lineno, "endpoint")
            v = _parse_int(toks[2], lineno, "endpoint")
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"line {lineno}: endpoint outside 1..{n}")
            edges.append((u - 1, v - 1))
        else:
            raise GraphFormatError(f"line {lineno}: unknown record {kind!r}")
    if n is None:
        raise GraphFormatError("missing problem line")
    if len(edges) != m:
        raise GraphFormatError(f"problem line announces {m} edges, found {len(edges)}")
    return Graph.build(n, edges)


def load_graph(source: str | bytes | IO, fmt: str = "edge-list") -> Graph:
    """Parse a graph from text, bytes, or a readable stream.

    ``fmt`` is ``"edge-list"`` (header ``n m`` then ``i j`` rows, ``#``
    comments) or ``"dimacs"`` (``p edge n m`` and ``e i j`` records).
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if fmt == "edge-list":
        return _parse_edge_list(source)
    if fmt == "dimacs":
        return _parse_dimacs(source)
    raise ValueError(f"unknown format {fmt!r}")


def sniff_format(text: str) -> str:
    """Guess the file format: a 'p' problem line means DIMACS."""
    for _, toks in _tokenize(text, "#"):
        if toks[0] == "p":
            return "dimacs"
        if toks[0] == "c" or toks[0] == "e":
            return "dimacs"
        return "edge-list"
    return "edge-list"


def dump_graph(g: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# generators

def complete(n: int) -> Graph:
    return Graph.build(n, itertools.combinations(range(n), 2))


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.build(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.build(n, [(i, i + 1) for i in range(n - 1)])


def hypercube(d: int) -> Graph:
    if d < 2:
        raise ValueError("hypercube needs d >= 2 to have 3 or more vertices")
    n = 1 << d
    edges = [(v, v ^ (1 << b)) for v in range(n) for b in range(d) if v < v ^ (1 << b)]
    return Graph.build(n, edges)


def gnp(n: int, p: float, seed: int) -> Graph:
    """Connected Erdos-Renyi sample; resamples up to GNP_MAX_RESAMPLES times."""
    if not 0.0 < p <= 1.0:
        raise ValueError("edge probability must be in (0, 1]")
    rng = random.Random(seed)
    for _ in range(GNP_MAX_RESAMPLES):
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
        try:
            return Graph.build(n, edges)
        except GraphFormatError:
            continue
    raise GraphFormatError(
        f"no connected G({n}, {p}) sample within {GNP_MAX_RESAMPLES} attempts"
    )


_FAMILIES = {
    "complete": complete,
    "cycle": cycle,
    "path": path,
    "hypercube": hypercube,
    "gnp": gnp,
}


def generate(family: str, *args) -> Graph:
    """Dispatch by family name: complete, cycle, path, hypercube, gnp."""
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    return builder(*args)


# ---------------------------------------------------------------------------
# exhaustive reference solvers

def _check_guard(g: Graph, guard: int):
    if g.n > guard:
        raise ValueError(f"refusing exhaustive search on n={g.n} > {guard}")


def _subset_cut(g: Graph, members: Sequence[int], mask: int) -> int:
    inv = ~mask
    return sum((g.adj_masks[v] & inv).bit_count() for v in members)


def brute_force_bisection(g: Graph, k: int, guard: int = ENUMERATION_GUARD) -> tuple[int, VertexSubset]:
    """Minimum cut over subsets of size exactly k, by enumeration.

    Ties are broken by the lexicographically smallest membership vector.
    """
    _check_guard(g, guard)
    if not 1 <= k <= g.n // 2:
        raise ValueError(f"k={k} outside [1, {g.n // 2}]")
    best = None
    for combo in itertools.combinations(range(g.n), k):
        mask = 0
        for v in combo:
            mask |= 1 << v
        val = _subset_cut(g, combo, mask)
        key = (val, tuple(mask >> i & 1 for i in range(g.n)))
        if best is None or key < best:
            best = key
    val, membership = best
    return val, VertexSubset.from_indices(g.n, [i for i, b in enumerate(membership) if b])


def brute_force_h(g: Graph, guard: int = ENUMERATION_GUARD) -> tuple[Fraction, VertexSubset]:
    """Exact edge expansion min |cut(S)|/|S| over 1 <= |S| <= n/2, by enumeration."""
    _check_guard(g, guard)
    best = None
    for k in range(1, g.n // 2 + 1):
        for combo in itertools.combinations(range(g.n), k):
            mask = 0
            for v in combo:
                mask |= 1 << v
            ratio = Fraction(_subset_cut(g, combo, mask), k)
            key = (ratio, tuple(mask >> i & 1 for i in range(g.n)))
            if best is None or key < best:
                best = key
    ratio, membership = best
    return ratio, VertexSubset.from_indices(g.n, [i for i, b in enumerate(membership) if b])


def brute_force_mincut(g: Graph, guard: int = ENUMERATION_GUARD) -> tuple[int, VertexSubset]:
    """Global minimum cut over proper nonempty subsets, by enumeration."""
    _check_guard(g, guard)
    best = None
    for k in range(1, g.n // 2 + 1):
        val, s = brute_force_bisection(g, k, guard)
        key = (val, s.membership())
        if best is None or key < best:
            best = key
            keep = s
    return best[0], keep

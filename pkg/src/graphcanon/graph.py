"""Sparse undirected simple graphs: representation, random generation, perturbation.

Graphs are immutable CSR adjacency structures with vertices 0..n-1. All
randomness flows through :class:`RngSeed`; there is no ambient RNG anywhere
in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import numpy as np

from .errors import ParameterError, ParseError

__all__ = [
    "Graph",
    "RngSeed",
    "RootedSubgraph",
    "generate_er",
    "union_graph",
    "xor_graph",
    "permute",
    "neighborhood",
    "read_edge_list",
    "write_edge_list",
]


@dataclass(frozen=True)
class RngSeed:
    """Seed plus stream id; identical pairs reproduce identical draws bit-for-bit."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


class Graph:
    """Immutable simple undirected graph in CSR form.

    ``indptr`` has length n+1; ``indices[indptr[v]:indptr[v+1]]`` is the
    strictly increasing neighbor list of v.
    """

    __slots__ = ("n", "indptr", "indices", "edge_count", "_degrees")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        if n < 0:
            raise ParameterError("vertex count must be >= 0")
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.edge_count = int(len(indices) // 2)
        self._degrees = np.diff(indptr)
        for arr in (self.indptr, self.indices, self._degrees):
            arr.flags.writeable = False
        self._check_invariants()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edge_arrays(cls, n: int, u: np.ndarray, v: np.ndarray) -> "Graph":
        """Build from parallel endpoint arrays (unordered pairs, no duplicates)."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.shape != v.shape:
            raise ParameterError("endpoint arrays must have equal length")
        if len(u) and (u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n):
            raise ParameterError("edge endpoint out of range")
        if np.any(u == v):
            raise ParameterError("self-loops are not allowed")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        keys = lo * n + hi
        if len(np.unique(keys)) != len(keys):
            raise ParameterError("duplicate edges are not allowed")
        return cls._from_pairs(n, lo, hi)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        pairs = list(edges)
        if not pairs:
            return cls._from_pairs(n, np.empty(0, np.int64), np.empty(0, np.int64))
        arr = np.asarray(pairs, dtype=np.int64)
        return cls.from_edge_arrays(n, arr[:, 0], arr[:, 1])

    @classmethod
    def from_adjacency(cls, lists: List[List[int]]) -> "Graph":
        n = len(lists)
        us, vs = [], []
        for a, nbrs in enumerate(lists):
            for b in nbrs:
                if b > a:
                    us.append(a)
                    vs.append(b)
        return cls.from_edge_arrays(n, np.array(us, np.int64), np.array(vs, np.int64))

    @classmethod
    def _from_pairs(cls, n: int, lo: np.ndarray, hi: np.ndarray) -> "Graph":
        """Trusted path: lo < hi, unique pairs, endpoints in range."""
        deg = np.bincount(lo, minlength=n) + np.bincount(hi, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        indices = np.ascontiguousarray(dst[order], dtype=np.int32)
        return cls(n, indptr, indices)

    def _check_invariants(self) -> None:
        ip, ix = self.indptr, self.indices
        if len(ip) != self.n + 1 or ip[0] != 0 or ip[-1] != len(ix):
            raise ParameterError("malformed CSR index pointers")
        if len(ix):
            if ix.min() < 0 or ix.max() >= self.n:
                raise ParameterError("neighbor id out of range")
            # strictly increasing within every row: no dups, no self-loops once
            # symmetry holds, and sortedness in one shot
            interior = np.diff(ix) > 0
            row_start = np.zeros(len(ix), dtype=bool)
            starts = ip[1:-1]
            row_start[starts[starts < len(ix)]] = True
            if not np.all(interior | row_start[1:]):
                raise ParameterError("adjacency rows must be strictly increasing")
            rows = np.repeat(np.arange(self.n), self._degrees)
            if np.any(rows == ix):
                raise ParameterError("self-loops are not allowed")
            fwd = np.sort(rows * self.n + ix.astype(np.int64))
            rev = np.sort(ix.astype(np.int64) * self.n + rows)
            if not np.array_equal(fwd, rev):
                raise ParameterError("adjacency is not symmetric")

    # -- accessors ---------------------------------------------------------

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self._degrees[v])

    def neighbors(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self) -> List[List[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        j = np.searchsorted(nb, v)
        return bool(j < len(nb) and nb[j] == v)

    def edge_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """All edges as (u, v) arrays with u < v, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self._degrees)
        mask = rows < self.indices
        return rows[mask], self.indices[mask].astype(np.int64)

    def edge_keys(self) -> np.ndarray:
        """Sorted int64 keys u*n+v (u < v) identifying the edge set."""
        u, v = self.edge_arrays()
        return u * self.n + v

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ParameterError(f"vertex id {v} out of range [0, {self.n})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edge_count, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class RootedSubgraph:
    """Induced subgraph around a center vertex; the root has local id 0."""

    root: int
    graph: Graph
    original_ids: np.ndarray = field(repr=False)


def generate_er(n: int, p: float, rng: RngSeed) -> Graph:
    """Sample G(n, p) by geometric skipping over the linearized pair index.

    Work is O(n + n^2 p) in expectation, never Theta(n^2) for small p.
    """
    if n < 0:
        raise ParameterError("n must be >= 0")
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph._from_pairs(n, np.empty(0, np.int64), np.empty(0, np.int64))
    if p == 1.0:
        lo, hi = np.triu_indices(n, k=1)
        return Graph._from_pairs(n, lo.astype(np.int64), hi.astype(np.int64))

    gen = rng.generator()
    chunks = []
    pos = -1
    while pos < total - 1:
        remaining = total - 1 - pos
        size = max(int(1.1 * remaining * p) + 16, 16)
        gaps = gen.geometric(p, size=size)
        cs = pos + np.cumsum(gaps)
        chunks.append(cs[cs < total])
        pos = int(cs[-1])
    idx = np.concatenate(chunks)

    # invert the triangular linearization: idx -> (u, v) with u < v
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(b * b - 8.0 * idx.astype(np.float64))) / 2).astype(np.int64)
    start = u * (2 * n - 1 - u) // 2
    u[start > idx] -= 1
    nxt = (u + 1) * (2 * n - 2 - u) // 2
    u[idx >= nxt] += 1
    start = u * (2 * n - 1 - u) // 2
    v = idx - start + u + 1
    return Graph._from_pairs(n, u, v)


def _require_same_n(g1: Graph, g2: Graph) -> None:
    if g1.n != g2.n:
        raise ParameterError(f"graphs have different vertex counts ({g1.n} vs {g2.n})")


def union_graph(g1: Graph, g2: Graph) -> Graph:
    """Edge present iff present in g1 or g2 (or both)."""
    _require_same_n(g1, g2)
    keys = np.union1d(g1.edge_keys(), g2.edge_keys())
    return Graph._from_pairs(g1.n, keys // g1.n, keys % g1.n)


def xor_graph(g1: Graph, g2: Graph) -> Graph:
    """Symmetric difference of the edge sets."""
    _require_same_n(g1, g2)
    keys = np.setxor1d(g1.edge_keys(), g2.edge_keys())
    return Graph._from_pairs(g1.n, keys // g1.n, keys % g1.n)


def permute(g: Graph, pi: np.ndarray) -> Graph:
    """Relabel: (pi[u], pi[v]) is an edge of the result iff (u, v) is an edge of g."""
    pi = np.asarray(pi, dtype=np.int64)
    if pi.shape != (g.n,) or not np.array_equal(np.sort(pi), np.arange(g.n)):
        raise ParameterError("pi must be a permutation of 0..n-1")
    u, v = g.edge_arrays()
    pu, pv = pi[u], pi[v]
    return Graph._from_pairs(g.n, np.minimum(pu, pv), np.maximum(pu, pv))


def neighborhood(g: Graph, v: int, r: int) -> RootedSubgraph:
    """Induced subgraph on all vertices at distance <= r from v, rooted at v."""
    g._check_vertex(v)
    if r < 0:
        raise ParameterError("radius must be >= 0")
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[v] = 0
    order = [v]
    frontier = [v]
    for d in range(1, r + 1):
        nxt: List[int] = []
        for w in frontier:
            for x in g.neighbors(w):
                if dist[x] < 0:
                    dist[x] = d
                    nxt.append(int(x))
        nxt.sort()
        order.extend(nxt)
        frontier = nxt
        if not frontier:
            break
    original_ids = np.array(order, dtype=np.int64)
    local = np.full(g.n, -1, dtype=np.int64)
    local[original_ids] = np.arange(len(order))
    us, vs = [], []
    for a in order:
        la = local[a]
        for b in g.neighbors(a):
            lb = local[b]
            if lb > la:
                us.append(int(la))
                vs.append(int(lb))
    sub = Graph._from_pairs(len(order), np.array(us, np.int64), np.array(vs, np.int64))
    return RootedSubgraph(root=0, graph=sub, original_ids=original_ids)


def write_edge_list(g: Graph) -> str:
    """Serialize as "n m" header plus one "u v" line per edge, sorted, u < v."""
    u, v = g.edge_arrays()
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{a} {b}" for a, b in zip(u.tolist(), v.tolist()))
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> Graph:
    """Parse the edge-list format; round-trip identity with write_edge_list."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input, expected 'n m' header", 1)
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(f"expected 'n m' header, got {lines[0]!r}", 1)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(f"non-integer header {lines[0]!r}", 1) from None
    if n < 0 or m < 0:
        raise ParseError("header counts must be nonnegative", 1)
    us = np.empty(m, dtype=np.int64)
    vs = np.empty(m, dtype=np.int64)
    seen: dict[int, int] = {}
    k = 0
    for ln, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'u v', got {raw!r}", ln)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer endpoint in {raw!r}", ln) from None
        if a == b:
            raise ParseError(f"self-loop ({a}, {b})", ln)
        if not (0 <= a < b < n):
            raise ParseError(f"endpoints must satisfy 0 <= u < v < n, got ({a}, {b})", ln)
        if k >= m:
            raise ParseError(f"more than the declared {m} edges", ln)
        key = a * n + b
        if key in seen:
            raise ParseError(f"duplicate edge ({a}, {b}), first seen on line {seen[key]}", ln)
        seen[key] = ln
        us[k], vs[k] = a, b
        k += 1
    if k != m:
        raise ParseError(f"declared {m} edges but found {k}", len(lines))
    return Graph._from_pairs(n, us, vs)

"""Depth-2 degree profiles and depth-3 color-count signatures, plus uniqueness auditing.

The per-vertex canonical label is serialized as a big-endian byte string:
a 4-byte list-length prefix followed by the lexicographically sorted
count-vectors (depth 3) or the decreasing neighbor degrees (depth 2).
Byte equality is label equality, and byte order is the lexicographic
order used by the matcher.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .coloring import ColorAssignment, ColorCountList, choose_m, color_count_list
from .errors import ParameterError, RegimeError
from .graph import Graph

__all__ = [
    "DegreeProfile",
    "Signature",
    "SignatureLabels",
    "UniquenessReport",
    "depth2_signature",
    "depth3_signature",
    "all_signatures",
    "signature_labels",
    "uniqueness_report",
    "default_modulus",
]

_LEN = struct.Struct(">I")


@dataclass(frozen=True)
class DegreeProfile:
    """Neighbor degrees in decreasing order (the depth-2 label)."""

    degrees: Tuple[int, ...]

    def to_bytes(self) -> bytes:
        return _LEN.pack(len(self.degrees)) + b"".join(
            _LEN.pack(d) for d in self.degrees
        )


@dataclass(frozen=True)
class Signature:
    """Multiset of neighbor color-count lists, canonicalized by lexicographic sort."""

    lists: Tuple[ColorCountList, ...]
    m: int

    def to_bytes(self) -> bytes:
        out = [_LEN.pack(len(self.lists))]
        for ccl in self.lists:
            out.extend(_LEN.pack(c) for c in ccl.counts)
        return b"".join(out)


@dataclass(frozen=True)
class UniquenessReport:
    all_unique: bool
    duplicate_groups: Tuple[Tuple[int, ...], ...]
    depth: int


@dataclass(frozen=True)
class SignatureLabels:
    """Compact per-vertex labels: ascending id sequences over a shared vector table.

    For depth 2 the ids are raw neighbor degrees (``table`` is None); for
    depth 3 they index ``table``, whose rows are the distinct count-vectors
    in lexicographic order. Byte labels are materialized on demand.
    """

    depth: int
    m: Optional[int]
    indptr: np.ndarray
    seq: np.ndarray
    table: Optional[np.ndarray]

    def __len__(self) -> int:
        return len(self.indptr) - 1

    def label_bytes(self, v: int) -> bytes:
        s, e = int(self.indptr[v]), int(self.indptr[v + 1])
        if self.depth == 2:
            body = self.seq[s:e][::-1].astype(">u4").tobytes()
        else:
            body = self.table[self.seq[s:e]].astype(">u4").tobytes()
        return _LEN.pack(e - s) + body

    def to_bytes_list(self) -> List[bytes]:
        ip = self.indptr
        if self.depth == 2:
            be = self.seq.astype(">u4")
            return [
                _LEN.pack(int(ip[v + 1] - ip[v])) + be[ip[v]:ip[v + 1]][::-1].tobytes()
                for v in range(len(self))
            ]
        table_be = np.ascontiguousarray(self.table.astype(">u4")) if self.table is not None else None
        if table_be is None or len(self.seq) == 0:
            empty = _LEN.pack(0)
            return [empty for _ in range(len(self))]
        big = table_be[self.seq].tobytes()
        w = 4 * table_be.shape[1]
        return [
            _LEN.pack(int(ip[v + 1] - ip[v])) + big[int(ip[v]) * w:int(ip[v + 1]) * w]
            for v in range(len(self))
        ]


def default_modulus(g: Graph) -> int:
    """Modulus used when the caller does not supply one.

    Applies choose_m with the empirical edge density; below the connectivity
    threshold (where no margin exists) falls back to ceil(ln n).
    """
    if g.n < 2:
        return 1
    p_hat = 2.0 * g.edge_count / (g.n * (g.n - 1))
    try:
        return choose_m(g.n, p_hat, "random").m
    except RegimeError:
        return max(1, math.ceil(math.log(g.n)))


def depth2_signature(g: Graph, v: int) -> DegreeProfile:
    """Decreasing-sorted degrees of v's neighbors."""
    degs = sorted((int(g.degrees[u]) for u in g.neighbors(v)), reverse=True)
    return DegreeProfile(degrees=tuple(degs))


def depth3_signature(
    g: Graph, ca: ColorAssignment, v: int, exclude_center: bool = False
) -> Signature:
    """Multiset {count-list of u : u ~ v}; a function of v's 3-neighborhood.

    ``exclude_center`` drops v itself from each neighbor's count list (the
    diagram variant) instead of counting over the full neighborhood.
    """
    if len(ca.colors) != g.n:
        raise ParameterError("color assignment does not match the graph")
    lists = []
    vc = int(ca.colors[v])
    for u in g.neighbors(v):
        ccl = color_count_list(g, ca, int(u))
        if exclude_center:
            counts = list(ccl.counts)
            counts[vc] -= 1
            ccl = ColorCountList(counts=tuple(counts))
        lists.append(ccl)
    lists.sort(key=lambda c: c.counts)
    return Signature(lists=tuple(lists), m=ca.m)


def _rank_rows(mat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct rows in lexicographic order plus the per-row rank (inverse)."""
    k = mat.shape[0]
    if k == 0:
        return mat[:0], np.empty(0, dtype=np.int64)
    order = np.lexsort(tuple(mat[:, c] for c in range(mat.shape[1] - 1, -1, -1)))
    s = mat[order]
    diff = np.empty(k, dtype=bool)
    diff[0] = True
    np.any(s[1:] != s[:-1], axis=1, out=diff[1:])
    inv = np.empty(k, dtype=np.int64)
    inv[order] = np.cumsum(diff) - 1
    return np.ascontiguousarray(s[diff]), inv


def _segment_sorted(rows: np.ndarray, vals: np.ndarray, limit: int) -> np.ndarray:
    """Sort vals within each row segment; rows must be ascending."""
    if len(vals) == 0:
        return vals.astype(np.int64)
    k = np.int64(max(limit, 1))
    key = rows * k + vals
    return np.sort(key) - rows * k


def signature_labels(
    g: Graph, depth: int, m: Optional[int] = None, exclude_center: bool = False
) -> SignatureLabels:
    """Compute all per-vertex labels at once in O((n+|E|) log n)."""
    if depth not in (2, 3):
        raise ParameterError("depth must be 2 or 3")
    n = g.n
    deg = g.degrees.astype(np.int64)
    rows = np.repeat(np.arange(n, dtype=np.int64), deg)
    ix = g.indices
    if depth == 2:
        nd = deg[ix]
        limit = int(deg.max()) + 1 if n > 0 else 1
        seq = _segment_sorted(rows, nd, limit)
        return SignatureLabels(depth=2, m=None, indptr=g.indptr, seq=seq, table=None)
    if m is None:
        m = default_modulus(g)
    if m < 1:
        raise ParameterError("modulus m must be >= 1")
    colors = deg % m
    counts = np.bincount(rows * m + colors[ix], minlength=n * m).reshape(n, m)
    if exclude_center:
        per_edge = counts[ix].copy()
        per_edge[np.arange(len(ix)), colors[rows]] -= 1
        table, ids = _rank_rows(per_edge)
    else:
        table, inv = _rank_rows(counts)
        ids = inv[ix]
    seq = _segment_sorted(rows, ids, len(table))
    return SignatureLabels(depth=3, m=m, indptr=g.indptr, seq=seq, table=table)


def all_signatures(
    g: Graph, depth: int, m: Optional[int] = None, exclude_center: bool = False
) -> List[bytes]:
    """Per-vertex canonical labels as byte strings."""
    return signature_labels(g, depth, m, exclude_center).to_bytes_list()


def _duplicate_groups_compact(sl: SignatureLabels) -> List[Tuple[int, ...]]:
    ip, seq = sl.indptr, sl.seq
    deg = np.diff(ip)
    groups: List[Tuple[int, ...]] = []
    for d in np.unique(deg):
        vs = np.nonzero(deg == d)[0]
        if len(vs) < 2:
            continue
        if d == 0:
            groups.append(tuple(int(v) for v in vs))
            continue
        mat = seq[ip[vs][:, None] + np.arange(d)]
        mat = np.ascontiguousarray(mat)
        view = mat.view(f"V{mat.dtype.itemsize * int(d)}").ravel()
        _, inv, cnt = np.unique(view, return_inverse=True, return_counts=True)
        for gi in np.nonzero(cnt >= 2)[0]:
            groups.append(tuple(int(v) for v in vs[inv == gi]))
    groups.sort(key=lambda grp: grp[0])
    return groups


def uniqueness_report(
    labels: Union[Sequence[bytes], SignatureLabels], depth: Optional[int] = None
) -> UniquenessReport:
    """Group exactly-equal labels; every group is confirmed by full comparison.

    Accepts either the byte-label list or the compact form. Hash buckets
    (dict / sorted runs) only propose candidates; membership is decided by
    exact equality, so hash collisions cannot produce false duplicates.
    """
    if isinstance(labels, SignatureLabels):
        groups = _duplicate_groups_compact(labels)
        rdepth = labels.depth
    else:
        buckets: dict[bytes, List[int]] = {}
        for v, lab in enumerate(labels):
            buckets.setdefault(lab, []).append(v)
        groups = sorted(
            (tuple(vs) for vs in buckets.values() if len(vs) >= 2),
            key=lambda grp: grp[0],
        )
        rdepth = depth if depth is not None else 0
    for grp in groups:
        if len(grp) < 2:
            raise AssertionError("duplicate group of size < 2")
    if isinstance(labels, SignatureLabels):
        deg = np.diff(labels.indptr)
        for grp in groups:
            if len({int(deg[v]) for v in grp}) != 1:
                raise AssertionError("signature equality must imply degree equality")
    return UniquenessReport(
        all_unique=not groups,
        duplicate_groups=tuple(groups),
        depth=rdepth,
    )

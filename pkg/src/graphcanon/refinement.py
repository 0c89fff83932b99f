"""Color Refinement (1-WL) from a modular-degree initialization.

Each round maps a vertex to the key (current class id, sorted multiset of
neighbor class ids) and recanonicalizes keys to dense integer ids by global
lexicographic sort, so isomorphic graphs produce identical id assignments.
One round costs O((n + |E|) log n).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .coloring import ColorAssignment, mod_color_classes
from .errors import ParameterError
from .graph import Graph

__all__ = ["StableColoring", "CanonicalLabeling", "refine", "refine_round", "canonical_label"]


@dataclass(frozen=True)
class StableColoring:
    colors: np.ndarray
    rounds: int
    class_count: int
    discrete: bool


@dataclass(frozen=True)
class CanonicalLabeling:
    """Exactly-three-round refinement labels plus a canonical certificate.

    ``labels`` holds one row per vertex: the dense class ids after rounds
    0..3. Certificate byte equality decides isomorphism whenever
    ``all_unique`` is true.
    """

    labels: np.ndarray
    certificate: bytes
    all_unique: bool
    m: int


def _dense(colors: np.ndarray) -> Tuple[np.ndarray, int]:
    """Map arbitrary integer colors to dense ids ordered by color value."""
    uniq, inv = np.unique(colors, return_inverse=True)
    return inv.astype(np.int64), len(uniq)


def refine_round(g: Graph, colors: np.ndarray) -> Tuple[np.ndarray, int]:
    """One refinement round; returns (new dense colors, class count).

    Class ids are assigned by lexicographic order of the key
    (previous id, sorted neighbor-id multiset), so they are canonical:
    label-independent and identical across isomorphic graphs.
    """
    n = g.n
    if n == 0:
        return colors.copy(), 0
    deg = g.degrees.astype(np.int64)
    rows = np.repeat(np.arange(n, dtype=np.int64), deg)
    nc = colors[g.indices]
    if len(nc):
        k = np.int64(int(colors.max()) + 1)
        seq = np.sort(rows * k + nc) - rows * k
    else:
        seq = nc.astype(np.int64)
    ip = g.indptr
    keys: List[Tuple] = [
        (int(colors[v]),) + tuple(seq[ip[v]:ip[v + 1]].tolist()) for v in range(n)
    ]
    order = {key: i for i, key in enumerate(sorted(set(keys)))}
    new_colors = np.fromiter((order[key] for key in keys), dtype=np.int64, count=n)
    return new_colors, len(order)


def refine(
    g: Graph, initial: ColorAssignment, max_rounds: Optional[int] = None
) -> StableColoring:
    """Iterate refinement until the class count stops increasing."""
    if len(initial.colors) != g.n:
        raise ParameterError("color assignment does not match the graph")
    colors, count = _dense(initial.colors)
    rounds = 0
    limit = g.n if max_rounds is None else max_rounds
    while rounds < limit:
        new_colors, new_count = refine_round(g, colors)
        rounds += 1
        if new_count == count:
            colors = new_colors
            break
        colors, count = new_colors, new_count
    return StableColoring(
        colors=colors, rounds=rounds, class_count=count, discrete=(count == g.n and g.n > 0)
    )


def canonical_label(g: Graph, m: Optional[int] = None) -> CanonicalLabeling:
    """Run exactly three refinement rounds from the degree-mod-m coloring.

    The per-vertex label is its class-id history over the four levels; the
    certificate serializes n, m, the sorted label multiset, and the edge
    multiset written in label space.
    """
    if m is None:
        m = max(1, math.ceil(math.log(g.n))) if g.n >= 2 else 1
    colors, _ = _dense(mod_color_classes(g, m).colors)
    history = [colors]
    for _ in range(3):
        colors, _ = refine_round(g, colors)
        history.append(colors)
    labels = np.stack(history, axis=1) if g.n else np.empty((0, 4), dtype=np.int64)
    final = labels[:, -1] if g.n else np.empty(0, dtype=np.int64)
    class_count = len(np.unique(final)) if g.n else 0
    all_unique = bool(g.n > 0 and class_count == g.n)

    head = struct.pack(">4sQQQQ", b"GCN1", g.n, m, g.edge_count, class_count)
    sorted_rows = labels[np.lexsort(tuple(labels[:, c] for c in range(3, -1, -1)))]
    label_bytes = np.ascontiguousarray(sorted_rows.astype(">u8")).tobytes()
    u, v = g.edge_arrays()
    if len(u):
        lu, lv = final[u], final[v]
        pairs = np.stack([np.minimum(lu, lv), np.maximum(lu, lv)], axis=1)
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        edge_bytes = np.ascontiguousarray(pairs.astype(">u8")).tobytes()
    else:
        edge_bytes = b""
    return CanonicalLabeling(
        labels=labels,
        certificate=head + label_bytes + edge_bytes,
        all_unique=all_unique,
        m=m,
    )

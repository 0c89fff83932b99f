"""Modular-degree color classes, color count lists, and modulus selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ParameterError, RegimeError
from .graph import Graph

__all__ = [
    "ColorAssignment",
    "ColorCountList",
    "ModulusChoice",
    "mod_color_classes",
    "color_count_list",
    "choose_m",
    "epsilon_star_solve",
]


@dataclass(frozen=True)
class ColorAssignment:
    """Per-vertex color deg(v) mod m, with class sizes."""

    m: int
    colors: np.ndarray
    class_sizes: np.ndarray

    def __post_init__(self):
        self.colors.flags.writeable = False
        self.class_sizes.flags.writeable = False


@dataclass(frozen=True)
class ColorCountList:
    """Length-m vector: entry k counts neighbors of color k."""

    counts: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class ModulusChoice:
    m: int
    epsilon_star: float
    delta: float
    regime: str  # "random" | "smoothed"


def mod_color_classes(g: Graph, m: int) -> ColorAssignment:
    """Color every vertex by its degree modulo m."""
    if m < 1:
        raise ParameterError("modulus m must be >= 1")
    colors = (g.degrees % m).astype(np.int64)
    class_sizes = np.bincount(colors, minlength=m)
    return ColorAssignment(m=m, colors=colors, class_sizes=class_sizes)


def color_count_list(
    g: Graph,
    ca: ColorAssignment,
    v: int,
    subset: Optional[Sequence[int]] = None,
) -> ColorCountList:
    """Counts of v's neighbors in each color class, optionally restricted to a vertex subset."""
    if len(ca.colors) != g.n:
        raise ParameterError("color assignment does not match the graph")
    nbrs = g.neighbors(v)
    if subset is not None:
        mask = np.zeros(g.n, dtype=bool)
        mask[np.asarray(list(subset), dtype=np.int64)] = True
        nbrs = nbrs[mask[nbrs]]
    counts = np.bincount(ca.colors[nbrs], minlength=ca.m)
    return ColorCountList(counts=tuple(int(c) for c in counts))


def _lower_tail_rate(delta: float) -> float:
    """delta + (1-delta) * ln(1-delta): the Chernoff lower-tail exponent rate."""
    return delta + (1.0 - delta) * math.log1p(-delta)


def epsilon_star_solve(a: float, tol: float = 1e-9) -> float:
    """Smallest margin eps* = 1 - delta* with a * rate(delta*) strictly above 1.

    rate(delta) = delta + (1-delta) ln(1-delta) increases from 0 to 1 on (0,1),
    so the smallest valid delta* is the root of rate = 1/a, found by bisection
    to absolute tolerance ``tol`` and nudged up one step to guarantee the
    strict inequality.
    """
    if a <= 1.0:
        raise ParameterError("a must exceed 1 (no valid margin otherwise)")
    target = 1.0 / a
    lo, hi = 0.0, 1.0 - 1e-15
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _lower_tail_rate(mid) > target:
            hi = mid
        else:
            lo = mid
    delta_star = min(hi + tol, 1.0 - 1e-15)
    if not a * _lower_tail_rate(delta_star) > 1.0:
        raise ArithmeticError("bisection failed to certify the strict inequality")
    return 1.0 - delta_star


def choose_m(n: int, p: Optional[float], regime: str = "random") -> ModulusChoice:
    """Select the signature modulus for the given regime.

    random:   m = ceil(3e / (eps* (1+delta))) with delta = np/ln(n) - 1,
              valid only above the connectivity threshold np > ln n.
    smoothed: m = ceil(ln n).
    """
    if regime == "smoothed":
        if n < 2:
            raise ParameterError("smoothed regime requires n >= 2")
        m = math.ceil(math.log(n))
        return ModulusChoice(m=m, epsilon_star=1.0, delta=0.0, regime="smoothed")
    if regime != "random":
        raise ParameterError(f"unknown regime {regime!r}")
    if n < 2:
        raise RegimeError("random regime requires n >= 2")
    if p is None:
        raise ParameterError("random regime requires p")
    log_n = math.log(n)
    if n * p <= log_n:
        raise RegimeError(
            f"np = {n * p:.4g} is at or below ln(n) = {log_n:.4g}; "
            "no positive connectivity margin"
        )
    delta = n * p / log_n - 1.0
    a = 1.0 + delta
    eps = epsilon_star_solve(a)
    m = math.ceil(3.0 * math.e / (eps * a))
    return ModulusChoice(m=m, epsilon_star=eps, delta=delta, regime="random")

"""Percolation on the complete d-ary tree of height h, without materializing it.

The tree has (d^{h+1} - 1)/(d - 1) vertices and one edge per non-root
vertex.  Percolation keeps each edge with probability q = 1 - c/h (the
supercritical scaling; the vanishing correction term is taken to be exactly
zero).  A streaming DFS draws every edge's Bernoulli on the fly and keeps
one frame per level, so working memory beyond the per-cluster tables is
O(h); cluster sizes and removed-edge heights are the only state that grows.

Removed-edge heights tau_1 <= tau_2 <= ... are reported in ascending order;
the survival law of the smallest one is exact and closed-form:
P(tau_1 > i) = q^{d (d^i - 1)/(d - 1)}, the kept-probability of all edges at
height <= i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .rng import kernel_seed


class BudgetExceededError(ValueError):
    """d^h beyond the configured memory/time guard."""


@dataclass(frozen=True)
class RegularParams:
    """Complete d-ary tree of height h with keep-probability q = 1 - c/h."""

    d: int
    h: int
    c: float

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("need d >= 2")
        if self.h < 1:
            raise ValueError("need h >= 1")
        if not 0.0 <= self.c <= self.h:
            raise ValueError("need 0 <= c <= h so that q lies in [0, 1]")
        if self.d ** self.h > 2 ** 32:
            raise BudgetExceededError("d^h exceeds the 2^32 budget guard")

    @property
    def q(self) -> float:
        return 1.0 - self.c / self.h

    @property
    def n_vertices(self) -> int:
        return total_vertices(self.d, self.h)

    @property
    def n_edges(self) -> int:
        return total_vertices(self.d, self.h) - 1


def total_vertices(d: int, h: int) -> int:
    return (d ** (h + 1) - 1) // (d - 1)


@dataclass(frozen=True)
class MemoryFootprint:
    """Peak auxiliary allocation of one streaming replication (in entries)."""

    stack_ints: int
    size_table_capacity: int
    tau_capacity: int


@dataclass(frozen=True)
class RegularClusterReport:
    """Cluster sizes (vertices) and removed-edge heights of one replication."""

    root_size: int
    ranked: np.ndarray
    tau: np.ndarray
    total: int
    memory: MemoryFootprint

    def to_record(self, seed: int, params: RegularParams, top_k: int = 10) -> dict:
        return {
            "seed": int(seed),
            "d": params.d,
            "h": params.h,
            "c": float(params.c),
            "G0": int(self.root_size),
            "G": [int(x) for x in self.ranked[:top_k]],
            "tau": [int(x) for x in self.tau[:top_k]],
        }


def percolate_regular(params: RegularParams,
                      rng: np.random.Generator) -> RegularClusterReport:
    """One percolation replication on the complete d-ary tree.

    Every edge is removed independently with probability 1 - q; clusters are
    accumulated in a single streaming DFS.  Deterministic given the state of
    ``rng`` (one 64-bit kernel seed is drawn from it).
    """
    remove_prob = 1.0 - params.q
    n_edges = params.n_edges
    # Preallocate the removed-edge tables at mean + 8 sigma; the kernel grows
    # them by doubling in the (astronomically rare) overflow case.
    mean = n_edges * remove_prob
    cap = int(mean + 8.0 * math.sqrt(max(mean * params.q, 1.0))) + 64
    seed = np.uint64(kernel_seed(rng))
    sizes, taus, size_cap, tau_cap = _kernels.percolate_regular_dfs(
        params.d, params.h, remove_prob, seed, cap + 1, cap)
    return RegularClusterReport(
        root_size=int(sizes[0]),
        ranked=np.sort(sizes[1:])[::-1],
        tau=np.sort(taus),
        total=int(sizes.sum()),
        memory=MemoryFootprint(
            stack_ints=2 * (params.h + 1),
            size_table_capacity=int(size_cap),
            tau_capacity=int(tau_cap),
        ),
    )


def tau_survival_exact(params: RegularParams, i: int) -> float:
    """Closed-form P(tau_1 > i): no removed edge at height <= i.

    There are d (d^i - 1)/(d - 1) edges at height at most i, each kept
    independently with probability q.
    """
    if not 1 <= i <= params.h:
        raise ValueError("need 1 <= i <= h")
    n_edges_below = params.d * (params.d ** i - 1) / (params.d - 1)
    if params.q == 0.0:
        return 0.0
    return math.exp(n_edges_below * math.log(params.q)) if params.q < 1.0 else 1.0

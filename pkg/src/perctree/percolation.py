"""Bernoulli bond-percolation on split trees and cluster extraction.

Each non-root vertex carries one edge (to its parent); percolation removes
every edge independently with probability 1 - p.  In the supercritical
regime the keep-probability scales like p_n = 1 - c / ln n, which is what
:meth:`PercolationParams.split_regime` constructs (the vanishing correction
term is taken to be exactly zero, the canonical reproducible choice).

Cluster extraction is one iterative DFS over the arena (compiled kernel):
a new cluster starts at the root and at the lower endpoint of every removed
edge.  The report carries both ball-count and vertex-count cluster sizes,
plus the removed-edge records (lower endpoint, its depth, and the ball count
of the full subtree below it) ordered by depth with ties left to right,
which by the arena layout is simply vertex-index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .split_tree import SplitTree, subtree_ball_counts


class ShapeMismatchError(ValueError):
    """Mask length does not match the tree."""


@dataclass(frozen=True)
class PercolationParams:
    """Keep-probability p plus the regime it was derived from."""

    p: float
    mode: str = "explicit"
    c: Optional[float] = None
    n: Optional[int] = None
    h: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"keep probability must lie in [0, 1], got {self.p}")

    @classmethod
    def explicit(cls, p: float) -> "PercolationParams":
        return cls(p=p)

    @classmethod
    def split_regime(cls, c: float, n: int) -> "PercolationParams":
        """Supercritical scaling for split trees: p = 1 - c / ln n."""
        if n < 2:
            raise ValueError("need n >= 2")
        if not 0.0 <= c <= math.log(n):
            raise ValueError("need 0 <= c <= ln n")
        return cls(p=1.0 - c / math.log(n), mode="split", c=c, n=n)

    @classmethod
    def regular_regime(cls, c: float, h: int) -> "PercolationParams":
        """Supercritical scaling for height-h regular trees: q = 1 - c / h."""
        if h < 1:
            raise ValueError("need h >= 1")
        if not 0.0 <= c <= h:
            raise ValueError("need 0 <= c <= h")
        return cls(p=1.0 - c / h, mode="regular", c=c, h=h)


@dataclass(frozen=True)
class EdgeMask:
    """Removal flags, one per vertex; the root entry is always False."""

    removed: np.ndarray

    @property
    def n_removed(self) -> int:
        return int(self.removed.sum())


def percolate(tree: SplitTree, params: PercolationParams,
              rng: np.random.Generator) -> EdgeMask:
    """Remove each parent edge independently with probability 1 - p."""
    removed = np.zeros(tree.n_vertices, dtype=np.bool_)
    if tree.n_vertices > 1:
        removed[1:] = rng.random(tree.n_vertices - 1) < (1.0 - params.p)
    return EdgeMask(removed)


def mask_from_removed_vertices(tree: SplitTree, vertices: Sequence[int]) -> EdgeMask:
    """Deterministic mask for fixtures and enumeration."""
    removed = np.zeros(tree.n_vertices, dtype=np.bool_)
    for v in vertices:
        if not 1 <= v < tree.n_vertices:
            raise ValueError(f"vertex {v} has no parent edge")
        removed[v] = True
    return EdgeMask(removed)


@dataclass(frozen=True)
class ClusterReport:
    """Everything percolation produces on one (tree, mask) pair.

    ``ranked_balls`` / ``ranked_vertices`` hold the non-root cluster sizes,
    each ranked in its own decreasing order.  The ``removed_*`` arrays are
    aligned with each other and sorted by depth (index order breaks ties
    left to right); ``removed_subtree_balls[i]`` is the ball count of the
    whole subtree hanging below removed edge i, not of the cluster there.
    """

    root_balls: int
    root_vertices: int
    ranked_balls: np.ndarray
    ranked_vertices: np.ndarray
    removed_vertices: np.ndarray
    removed_depths: np.ndarray
    removed_subtree_balls: np.ndarray
    n_balls: int
    n_vertices: int

    def to_record(self, seed: int, c: Optional[float], top_k: int = 10) -> dict:
        """JSON-ready replication record (ranked lists truncated to top_k)."""
        return {
            "seed": int(seed),
            "n": int(self.n_balls),
            "c": None if c is None else float(c),
            "C0": int(self.root_balls),
            "C0_hat": int(self.root_vertices),
            "C": [int(x) for x in self.ranked_balls[:top_k]],
            "C_hat": [int(x) for x in self.ranked_vertices[:top_k]],
            "tau_depths": [int(x) for x in self.removed_depths[:top_k]],
            "n_early": [int(x) for x in self.removed_subtree_balls[:top_k]],
        }


def clusters(tree: SplitTree, mask: EdgeMask,
             subtree_counts: Optional[np.ndarray] = None) -> ClusterReport:
    """Extract all percolation clusters in one DFS.

    A pure function of (tree, mask).  ``subtree_counts`` may be passed to
    reuse a previously computed accumulation, otherwise it is computed here.
    """
    if mask.removed.shape != (tree.n_vertices,):
        raise ShapeMismatchError("mask does not match tree")
    if mask.removed[0]:
        raise ShapeMismatchError("root has no parent edge to remove")
    if subtree_counts is None:
        subtree_counts = subtree_ball_counts(tree)
    _, balls, verts = _kernels.label_clusters(
        tree.child_lo, tree.child_hi, mask.removed, tree.ball_count)
    ranked_balls = np.sort(balls[1:])[::-1]
    ranked_vertices = np.sort(verts[1:])[::-1]
    removed_idx = np.flatnonzero(mask.removed)
    return ClusterReport(
        root_balls=int(balls[0]),
        root_vertices=int(verts[0]),
        ranked_balls=ranked_balls,
        ranked_vertices=ranked_vertices,
        removed_vertices=removed_idx,
        removed_depths=tree.depth[removed_idx],
        removed_subtree_balls=subtree_counts[removed_idx],
        n_balls=int(balls.sum()),
        n_vertices=int(verts.sum()),
    )


def counting_process(report: ClusterReport, n: int, t_grid) -> np.ndarray:
    """N_n(t) over a grid: removed edges whose subtree stores >= n/(t ln n).

    N_n(0) = 0 by convention.  ``t_grid`` must be non-negative and
    non-decreasing (the process is a counting process in t).
    """
    if n < 2:
        raise ValueError("need n >= 2 so that ln n > 0")
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.size and (t_grid.min() < 0 or np.any(np.diff(t_grid) < 0)):
        raise ValueError("t_grid must be non-negative and non-decreasing")
    sub = np.sort(report.removed_subtree_balls)
    out = np.zeros(t_grid.size, dtype=np.int64)
    log_n = math.log(n)
    for j, t in enumerate(t_grid):
        if t > 0.0:
            out[j] = sub.size - np.searchsorted(sub, n / (t * log_n), side="left")
    return out

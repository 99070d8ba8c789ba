"""Exact percolation laws on tiny trees by exhaustive mask enumeration.

For a tree with E <= 20 edges every one of the 2^E removal masks is pushed
through the production cluster extraction, weighted by
p^{#kept} (1-p)^{#removed} (accumulated from per-edge log factors), and
aggregated into an exact pmf.  Because the enumeration reuses the real
clusters code, agreement with Monte Carlo sampling validates the whole
percolation path; the ground truth comes from exhaustiveness, not from a
second implementation.

A registry of named fixture trees is included for tests and the command
line; ``dump_mask_table`` writes the full per-mask table for human audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .percolation import EdgeMask, clusters
from .split_tree import SplitTree, subtree_ball_counts

MAX_EDGES = 20


class EnumerationTooLargeError(ValueError):
    """More than MAX_EDGES edges; exhaustive enumeration refused."""


@dataclass(frozen=True)
class ExactDistribution:
    """Finite exact pmf over outcome keys."""

    probs: dict

    def __post_init__(self):
        total = math.fsum(self.probs.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if any(p < 0.0 for p in self.probs.values()):
            raise ValueError("negative probability")

    def prob(self, key) -> float:
        return self.probs.get(key, 0.0)

    def support(self):
        return sorted(self.probs, key=repr)


def _mask_weights(n_edges: int, p: float) -> np.ndarray:
    """exp(sum of per-edge log factors), indexed by number of removed edges."""
    weights = np.zeros(n_edges + 1)
    if p == 1.0:
        weights[0] = 1.0
        return weights
    if p == 0.0:
        weights[n_edges] = 1.0
        return weights
    log_keep, log_rem = math.log(p), math.log(1.0 - p)
    for k in range(n_edges + 1):
        weights[k] = math.exp(k * log_rem + (n_edges - k) * log_keep)
    return weights


def _enumerate(tree: SplitTree, p: float, key_fn, reverse: bool = False) -> dict:
    n_edges = tree.n_vertices - 1
    if n_edges > MAX_EDGES:
        raise EnumerationTooLargeError(f"{n_edges} edges > {MAX_EDGES}")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    weights = _mask_weights(n_edges, p)
    sub = subtree_ball_counts(tree)
    acc: dict = {}
    order = range((1 << n_edges) - 1, -1, -1) if reverse else range(1 << n_edges)
    removed = np.zeros(tree.n_vertices, dtype=np.bool_)
    for bits in order:
        for j in range(n_edges):
            removed[j + 1] = bool((bits >> j) & 1)
        w = float(weights[bits.bit_count()])
        if w == 0.0:
            continue
        report = clusters(tree, EdgeMask(removed.copy()), subtree_counts=sub)
        key = key_fn(report)
        acc[key] = acc.get(key, 0.0) + w
    return acc


def exact_root_cluster_law(tree: SplitTree, p: float, by: str = "balls",
                           reverse: bool = False) -> ExactDistribution:
    """Exact pmf of the root-cluster size (balls by default, vertices by flag)."""
    if by == "balls":
        key_fn = lambda r: int(r.root_balls)
    elif by == "vertices":
        key_fn = lambda r: int(r.root_vertices)
    else:
        raise ValueError("by must be 'balls' or 'vertices'")
    return ExactDistribution(_enumerate(tree, p, key_fn, reverse))


def exact_ranked_law(tree: SplitTree, p: float, by: str = "balls",
                     reverse: bool = False) -> ExactDistribution:
    """Exact pmf over tuples (root size; non-root sizes ranked decreasing)."""
    if by == "balls":
        key_fn = lambda r: (int(r.root_balls),) + tuple(int(x) for x in r.ranked_balls)
    elif by == "vertices":
        key_fn = lambda r: (int(r.root_vertices),) + tuple(int(x) for x in r.ranked_vertices)
    else:
        raise ValueError("by must be 'balls' or 'vertices'")
    return ExactDistribution(_enumerate(tree, p, key_fn, reverse))


def complete_regular_tree(d: int, h: int) -> SplitTree:
    """Complete d-ary tree of height h as an arena, one ball per vertex.

    Heap indexing (children of i are d*i + 1 .. d*i + d) is breadth-first,
    so the arena layout contract holds.
    """
    n = (d ** (h + 1) - 1) // (d - 1)
    parent = np.empty(n, dtype=np.int64)
    parent[0] = -1
    if n > 1:
        parent[1:] = (np.arange(1, n) - 1) // d
    return SplitTree.from_parents(parent, np.ones(n, dtype=np.int64))


@dataclass(frozen=True)
class RegularExactLaw:
    """Joint law of (G0, G1) plus the law of tau_1 (0 means no removed edge)."""

    joint: ExactDistribution
    tau1: ExactDistribution


def exact_regular_law(d: int, h: int, q: float) -> RegularExactLaw:
    """Exact laws for percolation on the complete d-ary tree of height h."""
    tree = complete_regular_tree(d, h)
    if tree.n_vertices - 1 > MAX_EDGES:
        raise EnumerationTooLargeError("regular tree has too many edges")

    def joint_key(r):
        g1 = int(r.ranked_vertices[0]) if r.ranked_vertices.size else 0
        return (int(r.root_vertices), g1)

    def tau_key(r):
        return int(r.removed_depths.min()) if r.removed_depths.size else 0

    return RegularExactLaw(
        joint=ExactDistribution(_enumerate(tree, q, joint_key)),
        tau1=ExactDistribution(_enumerate(tree, q, tau_key)),
    )


def dump_mask_table(tree: SplitTree, p: float, stream, by: str = "balls") -> None:
    """One line per mask: mask bits, outcome key, probability (audit format)."""
    n_edges = tree.n_vertices - 1
    if n_edges > MAX_EDGES:
        raise EnumerationTooLargeError(f"{n_edges} edges > {MAX_EDGES}")
    weights = _mask_weights(n_edges, p)
    sub = subtree_ball_counts(tree)
    removed = np.zeros(tree.n_vertices, dtype=np.bool_)
    for bits in range(1 << n_edges):
        for j in range(n_edges):
            removed[j + 1] = bool((bits >> j) & 1)
        report = clusters(tree, EdgeMask(removed.copy()), subtree_counts=sub)
        if by == "balls":
            key = (int(report.root_balls),) + tuple(int(x) for x in report.ranked_balls)
        else:
            key = (int(report.root_vertices),) + tuple(int(x) for x in report.ranked_vertices)
        key_txt = ",".join(str(x) for x in key)
        prob = float(weights[bits.bit_count()])
        stream.write(f"{bits:0{max(n_edges, 1)}b}\t{key_txt}\t{prob!r}\n")


def fixture_tree(name: str) -> SplitTree:
    """Named tiny trees shared by tests, docs, and the command line.

    * ``edge``       two vertices, one ball each (1 edge).
    * ``path3``      four-vertex path, one ball each (3 edges).
    * ``star3``      root with three leaves, one ball each (3 edges).
    * ``full7``      complete binary tree on 7 vertices, one ball each.
    * ``mixed7``     7 vertices with uneven ball counts (balls != vertices).
    """
    if name == "edge":
        return SplitTree.from_parents([-1, 0], [1, 1])
    if name == "path3":
        return SplitTree.from_parents([-1, 0, 1, 2], [1, 1, 1, 1])
    if name == "star3":
        return SplitTree.from_parents([-1, 0, 0, 0], [1, 1, 1, 1])
    if name == "full7":
        return SplitTree.from_parents([-1, 0, 0, 1, 1, 2, 2], [1] * 7)
    if name == "mixed7":
        return SplitTree.from_parents([-1, 0, 0, 1, 1, 2, 2], [2, 1, 1, 3, 1, 1, 2])
    raise ValueError(f"unknown fixture {name!r}")


FIXTURE_NAMES = ("edge", "path3", "star3", "full7", "mixed7")

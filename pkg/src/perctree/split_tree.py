"""Random split trees: generation and per-vertex statistics.

A split tree distributes n balls down a b-ary tree.  Every vertex is a
bucket of capacity s.  A ball entering an already-split (internal) vertex
descends to child i with probability V_i from that vertex's own split
vector; a ball landing in a leaf with s balls triggers the split: s0 balls
stay, s1 balls are forced to each of the b children, and the remaining
s + 1 - s0 - b*s1 balls descend independently per the split vector, the same
rule cascading into any child that ends up above capacity.  Subtrees that
receive no balls do not exist.

Generation here processes the overflow cascade breadth-first in vectorized
batches: the balls a vertex will ever receive are routed by one multinomial
draw per vertex (forced s1 allotments added separately), which yields the
same child-count law as inserting balls one at a time because both the split
redistribution and later per-ball descents use the vertex's single split
vector, and multinomials with common weights merge.  Only counts are
tracked; ball identities never matter for the statistics exposed here.

The arena stores vertices in breadth-first order: ``parent[v] < v``, the
parent array is non-decreasing over non-root vertices, and the children of
any vertex occupy one contiguous index range, left to right.  Sorting
vertices by index therefore sorts by (depth, left-to-right position), which
is the tie order used for removed-edge bookkeeping downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .split_vector import SplitVectorSpec, sample_block, uniform_binary, deterministic_uniform, fixed_multiset


class VertexBudgetError(RuntimeError):
    """Generation exceeded the configured vertex cap."""


class RecordingDisabledError(RuntimeError):
    """Edge weights were not recorded during generation."""


@dataclass(frozen=True)
class SplitTreeParams:
    """Generation parameters (b, s, s0, s1, split-vector law, ball count n).

    The integers must satisfy 0 < s, 0 <= s0 <= s and
    0 <= b*s1 <= s + 1 - s0, which guarantees the overflow redistribution is
    well defined.
    """

    b: int
    s: int
    s0: int
    s1: int
    vector_spec: SplitVectorSpec
    n: int

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("capacity s must be positive")
        if not 0 <= self.s0 <= self.s:
            raise ValueError("need 0 <= s0 <= s")
        if self.s1 < 0 or self.b * self.s1 > self.s + 1 - self.s0:
            raise ValueError("need 0 <= b*s1 <= s + 1 - s0")
        if self.vector_spec.b != self.b:
            raise ValueError("vector_spec branch factor does not match b")
        if self.n < 1:
            raise ValueError("need at least one ball")

    def with_n(self, n: int) -> "SplitTreeParams":
        return SplitTreeParams(self.b, self.s, self.s0, self.s1, self.vector_spec, n)


def bst_params(n: int) -> SplitTreeParams:
    """Binary-search-tree parameters: b=2, s=s0=1, s1=0, (U, 1-U) vectors."""
    return SplitTreeParams(2, 1, 1, 0, uniform_binary(), n)


def uniform_trie_params(b: int, n: int) -> SplitTreeParams:
    """Trie with the constant split vector (1/b, ..., 1/b): s=1, s0=s1=0."""
    return SplitTreeParams(b, 1, 0, 0, deterministic_uniform(b), n)


def multiset_trie_params(probs, n: int) -> SplitTreeParams:
    """Trie routed by a fixed multiset of probabilities (lattice when the
    -ln values share a span)."""
    spec = fixed_multiset(probs)
    return SplitTreeParams(spec.b, 1, 0, 0, spec, n)


class SplitTree:
    """Arena-stored rooted tree with per-vertex ball counts and depths.

    Immutable after construction; all arrays are read-only views.  Vertex 0
    is the root.  ``edge_weight[v]`` is the split-vector component selected
    on the edge into v (NaN at the root) and is present only when generation
    ran with ``record_weights=True``.
    """

    __slots__ = ("parent", "depth", "ball_count", "child_lo", "child_hi",
                 "edge_weight", "params")

    def __init__(self, parent, depth, ball_count, edge_weight=None,
                 params: Optional[SplitTreeParams] = None):
        parent = np.ascontiguousarray(parent, dtype=np.int64)
        depth = np.ascontiguousarray(depth, dtype=np.int64)
        ball_count = np.ascontiguousarray(ball_count, dtype=np.int64)
        n = parent.size
        if n == 0 or parent[0] != -1:
            raise ValueError("vertex 0 must be the root (parent -1)")
        if n > 1:
            body = parent[1:]
            if body.min() < 0:
                raise ValueError("multiple roots")
            if np.any(body[1:] < body[:-1]):
                raise ValueError("parent array must be non-decreasing (BFS order)")
            if np.any(body >= np.arange(1, n)):
                raise ValueError("parents must precede children")
        self.parent = parent
        self.depth = depth
        self.ball_count = ball_count
        # children of v are the contiguous run of indices with parent == v
        degree = np.bincount(parent[1:], minlength=n) if n > 1 else np.zeros(1, np.int64)
        hi = np.cumsum(degree, dtype=np.int64) + 1
        self.child_lo = hi - degree
        self.child_hi = hi
        self.edge_weight = None
        if edge_weight is not None:
            self.edge_weight = np.ascontiguousarray(edge_weight, dtype=np.float64)
        self.params = params
        for arr in (self.parent, self.depth, self.ball_count,
                    self.child_lo, self.child_hi):
            arr.setflags(write=False)
        if self.edge_weight is not None:
            self.edge_weight.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return self.parent.size

    @property
    def n_balls(self) -> int:
        return int(self.ball_count.sum())

    def children(self, v: int) -> np.ndarray:
        return np.arange(self.child_lo[v], self.child_hi[v])

    def is_leaf(self, v: int) -> bool:
        return self.child_lo[v] == self.child_hi[v]

    @classmethod
    def from_parents(cls, parents, ball_counts,
                     params: Optional[SplitTreeParams] = None) -> "SplitTree":
        """Build a tree from explicit arrays (fixtures, oracles).

        ``parents`` must already be in breadth-first order (parent index
        below child index, non-decreasing).
        """
        parents = np.asarray(parents, dtype=np.int64)
        depth = np.zeros(parents.size, dtype=np.int64)
        for v in range(1, parents.size):
            depth[v] = depth[parents[v]] + 1
        return cls(parents, depth, np.asarray(ball_counts, dtype=np.int64),
                   params=params)

    def dump(self, stream) -> None:
        """Line-oriented debug dump: index, parent, depth, ball_count."""
        for v in range(self.n_vertices):
            stream.write(f"{v}\t{self.parent[v]}\t{self.depth[v]}\t{self.ball_count[v]}\n")


def generate(params: SplitTreeParams, rng: np.random.Generator, *,
             record_weights: bool = False,
             vertex_cap: Optional[int] = None) -> SplitTree:
    """Generate one random split tree.

    ``vertex_cap`` guards pathological parameter choices (default 64*n);
    exceeding it raises :class:`VertexBudgetError`.  With
    ``record_weights=True`` the selected split-vector component of every
    edge is stored so root-to-vertex weight products can be reconstructed.
    """
    if vertex_cap is None:
        vertex_cap = 64 * params.n
    spec = params.vector_spec
    b, s, s0, s1 = params.b, params.s, params.s0, params.s1

    parent_parts = [np.array([-1], dtype=np.int64)]
    depth_parts = [np.zeros(1, dtype=np.int64)]
    ball_parts = []
    weight_parts = [np.array([np.nan])] if record_weights else None

    frontier_counts = np.array([params.n], dtype=np.int64)
    frontier_ids = np.array([0], dtype=np.int64)
    total_vertices = 1
    level = 0
    while frontier_counts.size:
        internal = frontier_counts > s
        ball_parts.append(np.where(internal, s0, frontier_counts))
        k = int(np.count_nonzero(internal))
        if k == 0:
            break
        remaining = frontier_counts[internal] - s0 - b * s1
        vectors = sample_block(spec, k, rng)
        if spec.kind == "uniform_binary":
            left = rng.binomial(remaining, vectors[:, 0])
            extra = np.column_stack((left, remaining - left))
        elif spec.kind == "deterministic_uniform":
            extra = rng.multinomial(remaining, vectors[0])
        else:
            extra = rng.multinomial(remaining, vectors)
        child_counts = (extra + s1).ravel()
        keep = child_counts > 0
        child_counts = child_counts[keep]
        child_parent = np.repeat(frontier_ids[internal], b)[keep]

        m = child_counts.size
        if total_vertices + m > vertex_cap:
            raise VertexBudgetError(
                f"vertex cap {vertex_cap} exceeded at depth {level + 1}")
        ids = np.arange(total_vertices, total_vertices + m, dtype=np.int64)
        total_vertices += m
        parent_parts.append(child_parent)
        depth_parts.append(np.full(m, level + 1, dtype=np.int64))
        if record_weights:
            weight_parts.append(vectors.ravel()[keep])
        frontier_counts = child_counts
        frontier_ids = ids
        level += 1

    parent = np.concatenate(parent_parts)
    depth = np.concatenate(depth_parts)
    ball = np.concatenate(ball_parts).astype(np.int64)
    weights = np.concatenate(weight_parts) if record_weights else None
    return SplitTree(parent, depth, ball, edge_weight=weights, params=params)


def subtree_ball_counts(tree: SplitTree) -> np.ndarray:
    """n_v for every vertex: balls stored in the subtree rooted at v.

    Satisfies n_root = n and n_v = ball_count[v] + sum over children.
    """
    return _kernels.subtree_accumulate(tree.parent, tree.ball_count)


def m_statistic(counts: np.ndarray, n: int, t: float) -> int:
    """Number of non-root vertices whose subtree stores >= n / (t ln n) balls.

    t = 0 returns 0 (empty threshold convention).  The threshold is compared
    as a real against the integer counts, no rounding.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if n < 2:
        raise ValueError("need n >= 2 so that ln n > 0")
    if t == 0.0:
        return 0
    threshold = n / (t * math.log(n))
    return int(np.count_nonzero(counts[1:] >= threshold))


def path_product(tree: SplitTree, vertex: int) -> float:
    """Product of the split-vector components along the root-to-vertex path.

    Requires generation with ``record_weights=True``; the root gives 1.0
    (empty product).
    """
    if tree.edge_weight is None:
        raise RecordingDisabledError(
            "generate(..., record_weights=True) is required for path products")
    prod = 1.0
    v = vertex
    while tree.parent[v] >= 0:
        prod *= tree.edge_weight[v]
        v = tree.parent[v]
    return prod


def validate(tree: SplitTree, params: Optional[SplitTreeParams] = None) -> None:
    """Structural validator walk; raises AssertionError on any violation.

    Checks the arena invariants plus, when params are known: internal
    vertices hold exactly s0 balls, leaves hold 1..s, ball counts sum to n,
    and no vertex exceeds b children.
    """
    p = params or tree.params
    n_vert = tree.n_vertices
    assert tree.parent[0] == -1 and tree.depth[0] == 0
    for v in range(1, n_vert):
        assert 0 <= tree.parent[v] < v
        assert tree.depth[v] == tree.depth[tree.parent[v]] + 1
    if p is not None:
        assert tree.ball_count.sum() == p.n
        for v in range(n_vert):
            degree = tree.child_hi[v] - tree.child_lo[v]
            assert degree <= p.b
            if degree > 0:
                assert tree.ball_count[v] == p.s0, f"internal vertex {v} != s0"
            else:
                assert 1 <= tree.ball_count[v] <= p.s, f"leaf {v} out of range"

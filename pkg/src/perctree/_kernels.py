"""Compiled hot loops: subtree accumulation, cluster DFS, regular-tree DFS.

All kernels are pure functions of their arguments.  The regular-tree kernel
carries its own xoshiro256** stream (seeded via splitmix64) so it needs no
global RNG state and is safe to call from multiple threads.

Arena layout contract (shared with split_tree): vertices are stored in
breadth-first order, so ``parent[v] < v`` for every non-root v, the parent
array restricted to v >= 1 is non-decreasing, and the children of any vertex
form one contiguous index range.
"""

import numpy as np
from numba import njit

U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)


@njit(cache=True, nogil=True)
def subtree_accumulate(parent, ball_count):
    """Per-vertex subtree ball counts by one reverse index sweep."""
    n_v = ball_count.copy()
    for v in range(parent.size - 1, 0, -1):
        n_v[parent[v]] += n_v[v]
    return n_v


@njit(cache=True, nogil=True)
def label_clusters(child_lo, child_hi, removed, ball_count):
    """Single iterative DFS assigning cluster ids and accumulating sizes.

    A new cluster starts at the root and at the lower endpoint of every
    removed edge.  Returns (cluster_id per vertex, balls per cluster,
    vertices per cluster); cluster 0 is the root cluster.
    """
    n = removed.size
    cid = np.empty(n, np.int64)
    balls = np.zeros(1 + int(removed.sum()), np.int64)
    verts = np.zeros(balls.size, np.int64)
    stack = np.empty(n, np.int64)
    cid[0] = 0
    next_cluster = 1
    top = 0
    stack[0] = 0
    while top >= 0:
        v = stack[top]
        top -= 1
        c = cid[v]
        balls[c] += ball_count[v]
        verts[c] += 1
        for w in range(child_lo[v], child_hi[v]):
            if removed[w]:
                cid[w] = next_cluster
                next_cluster += 1
            else:
                cid[w] = c
            top += 1
            stack[top] = w
    return cid, balls, verts


@njit(cache=True, nogil=True, inline="always")
def _splitmix64(x):
    x = x + _GAMMA
    z = x
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return x, z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def percolate_regular_dfs(d, h, remove_prob, seed, size_cap, tau_cap):
    """Streaming DFS percolation of the complete d-ary tree of height h.

    The tree is never materialized: the walk keeps one frame per level
    (child progress and cluster id), draws each edge's Bernoulli on the fly,
    and accumulates cluster sizes in a table indexed by cluster id.  Working
    memory beyond the cluster/tau tables is O(h).

    Returns (cluster_sizes[:n_clusters], tau_heights[:n_removed],
    size_table_capacity, tau_capacity); the capacity values let callers audit
    peak auxiliary allocation.  cluster_sizes[0] is the root cluster.
    """
    # xoshiro256** seeded from splitmix64(seed)
    x = U64(seed)
    x, s0 = _splitmix64(x)
    x, s1 = _splitmix64(x)
    x, s2 = _splitmix64(x)
    x, s3 = _splitmix64(x)

    sizes = np.zeros(size_cap, np.int64)
    taus = np.empty(tau_cap, np.int64)
    child_next = np.zeros(h + 1, np.int64)
    clus = np.zeros(h + 1, np.int64)

    sizes[0] = 1  # root
    n_clusters = 1
    n_tau = 0
    level = 0
    clus[0] = 0
    child_next[0] = 0
    while level >= 0:
        if level == h or child_next[level] == d:
            level -= 1
            continue
        child_next[level] += 1
        # next uint64 from xoshiro256**
        r = s1 * U64(5)
        r = ((r << U64(7)) | (r >> U64(57))) * U64(9)
        t = s1 << U64(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << U64(45)) | (s3 >> U64(19))
        u = (r >> U64(11)) * (1.0 / 9007199254740992.0)
        if u < remove_prob:
            if n_clusters == sizes.size:
                grown = np.zeros(sizes.size * 2, np.int64)
                grown[: sizes.size] = sizes
                sizes = grown
            cid = n_clusters
            n_clusters += 1
            sizes[cid] = 1
            if n_tau == taus.size:
                grown_t = np.empty(taus.size * 2, np.int64)
                grown_t[: taus.size] = taus
                taus = grown_t
            taus[n_tau] = level + 1
            n_tau += 1
        else:
            cid = clus[level]
            sizes[cid] += 1
        level += 1
        clus[level] = cid
        child_next[level] = 0
    return sizes[:n_clusters], taus[:n_tau], sizes.size, taus.size

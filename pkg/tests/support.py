"""Shared verification helpers: Monte Carlo vs exact-enumeration agreement."""

import math

from perctree import (PercolationParams, RegularParams, clusters,
                      exact_ranked_law, exact_regular_law,
                      exact_root_cluster_law, make_generator, percolate,
                      percolate_regular)


def mc_vs_exact_split(tree, p, n_samples, seed, min_prob=0.005, sigmas=3.0):
    """Compare MC frequencies of C0 and of the ranked tuple to the exact pmfs.

    Returns a list of violation strings (empty = agreement): every outcome
    with exact probability >= min_prob must match within ``sigmas`` binomial
    standard errors.
    """
    exact_root = exact_root_cluster_law(tree, p)
    exact_ranked = exact_ranked_law(tree, p)
    rng = make_generator(seed)
    params = PercolationParams.explicit(p)
    root_counts, ranked_counts = {}, {}
    for _ in range(n_samples):
        rep = clusters(tree, percolate(tree, params, rng))
        key_root = int(rep.root_balls)
        key_ranked = (int(rep.root_balls),) + tuple(int(x) for x in rep.ranked_balls)
        root_counts[key_root] = root_counts.get(key_root, 0) + 1
        ranked_counts[key_ranked] = ranked_counts.get(key_ranked, 0) + 1
    bad = []
    for label, exact, counts in (("C0", exact_root, root_counts),
                                 ("ranked", exact_ranked, ranked_counts)):
        for key in exact.support():
            prob = exact.prob(key)
            if prob < min_prob:
                continue
            freq = counts.get(key, 0) / n_samples
            se = math.sqrt(prob * (1.0 - prob) / n_samples)
            if abs(freq - prob) > sigmas * se:
                bad.append(f"{label} {key}: freq {freq:.5f} vs exact {prob:.5f} "
                           f"(se {se:.5f})")
    return bad


def mc_vs_exact_regular(d, h, q, n_samples, seed, min_prob=0.005, sigmas=3.0):
    """Same agreement check for (G0, G1) and tau_1 on the complete d-ary tree."""
    law = exact_regular_law(d, h, q)
    params = RegularParams(d, h, (1.0 - q) * h)
    assert abs(params.q - q) < 1e-12
    rng = make_generator(seed)
    joint_counts, tau_counts = {}, {}
    for _ in range(n_samples):
        rep = percolate_regular(params, rng)
        g1 = int(rep.ranked[0]) if rep.ranked.size else 0
        tau1 = int(rep.tau[0]) if rep.tau.size else 0
        key = (int(rep.root_size), g1)
        joint_counts[key] = joint_counts.get(key, 0) + 1
        tau_counts[tau1] = tau_counts.get(tau1, 0) + 1
    bad = []
    for label, exact, counts in (("joint", law.joint, joint_counts),
                                 ("tau1", law.tau1, tau_counts)):
        for key in exact.support():
            prob = exact.prob(key)
            if prob < min_prob:
                continue
            freq = counts.get(key, 0) / n_samples
            se = math.sqrt(prob * (1.0 - prob) / n_samples)
            if abs(freq - prob) > sigmas * se:
                bad.append(f"{label} {key}: freq {freq:.5f} vs exact {prob:.5f} "
                           f"(se {se:.5f})")
    return bad


def random_small_tree(rng, max_edges=10):
    """Random tiny BFS-ordered tree for property tests (not a split-tree law)."""
    from perctree import SplitTree
    n = int(rng.integers(1, max_edges + 2))
    parents = [-1]
    # parents must be non-decreasing for the arena contract; draw sorted
    if n > 1:
        raw = sorted(int(rng.integers(0, v)) for v in range(1, n))
        parents += raw
    balls = [int(rng.integers(1, 5)) for _ in range(n)]
    return SplitTree.from_parents(parents, balls)

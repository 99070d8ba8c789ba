"""Generating random split trees and reading off their basic statistics.

Three classic parameterizations of the same ball-distribution scheme:
the binary search tree (b=2, s=s0=1, s1=0, vectors (U, 1-U)), the uniform
trie (constant vector (1/b, ..., 1/b)), and a trie routed by a fixed
multiset of probabilities.
"""

import numpy as np

from perctree import (bst_params, entropy_mu, generate, lattice_span,
                      make_generator, multiset_trie_params, path_product,
                      subtree_ball_counts, uniform_trie_params, validate)

rng = make_generator(2024)

print("== binary search tree, n = 10_000 balls ==")
tree = generate(bst_params(10_000), rng)
validate(tree)
print(f"vertices: {tree.n_vertices} (equals n for this parameterization)")
print(f"max depth: {tree.depth.max()}, mean depth: {tree.depth.mean():.2f}")
print(f"typical depth scale ln(n)/mu = {np.log(10_000) / 0.5:.2f}")

counts = subtree_ball_counts(tree)
print(f"root subtree stores all {counts[0]} balls")
kids = tree.children(0)
print(f"root children store {[int(counts[v]) for v in kids]} balls")

print()
print("== uniform trie, b = 3 ==")
trie = generate(uniform_trie_params(3, 10_000), rng, record_weights=True)
validate(trie)
print(f"vertices: {trie.n_vertices} (random; internal vertices hold 0 balls)")
v = int(np.flatnonzero(trie.depth == 4)[0])
print(f"weight product to a depth-4 vertex: {path_product(trie, v):.6f} "
      f"(= 3^-4 = {3.0 ** -4:.6f})")

print()
print("== the constants every limit depends on ==")
for label, params in [
        ("bst", bst_params(2)),
        ("uniform trie b=2", uniform_trie_params(2, 2)),
        ("multiset (1/2,1/4,1/8,1/8)", multiset_trie_params((0.5, 0.25, 0.125, 0.125), 2))]:
    spec = params.vector_spec
    span = lattice_span(spec)
    print(f"{label:30s} mu = {entropy_mu(spec):.6f}  "
          f"span = {'none (non-lattice)' if span is None else f'{span:.6f}'}")

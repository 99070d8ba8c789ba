"""Streaming percolation on the complete d-ary tree.

The tree of height h has (d^{h+1}-1)/(d-1) vertices but is never stored:
each edge's Bernoulli is drawn during one DFS with O(h) frames.  The
smallest removed-edge height tau_1 has the exact survival law
P(tau_1 > i) = q^{d(d^i-1)/(d-1)}, checked here against 2000 replications.
"""

import math

from perctree import (RegularParams, make_generator, percolate_regular,
                      tau_survival_exact, total_vertices)

d, h, c = 2, 16, 1.0
params = RegularParams(d, h, c)
rng = make_generator(11)
print(f"complete {d}-ary tree of height {h}: {total_vertices(d, h)} vertices, "
      f"q = {params.q:.4f}")

rep = percolate_regular(params, rng)
print(f"root cluster G0 = {rep.root_size} "
      f"(G0 d^-h = {rep.root_size * float(d) ** -h:.4f}, "
      f"limit d e^-c/(d-1) = {d * math.exp(-c) / (d - 1):.4f})")
print(f"largest non-root clusters: {rep.ranked[:5]}")
print(f"first removed-edge heights: {rep.tau[:8]}")
print(f"auxiliary memory: {rep.memory.stack_ints} stack ints, "
      f"{rep.memory.size_table_capacity + rep.memory.tau_capacity} table entries "
      f"(vs {total_vertices(d, h)} vertices if materialized)")

print()
print("tau_1 survival: empirical over 2000 replications vs exact")
reps = 2000
survived = {i: 0 for i in range(1, 6)}
for _ in range(reps):
    r = percolate_regular(params, rng)
    tau1 = int(r.tau[0]) if r.tau.size else h + 1
    for i in survived:
        survived[i] += tau1 > i
for i in range(1, 6):
    emp = survived[i] / reps
    exact = tau_survival_exact(params, i)
    se = math.sqrt(exact * (1 - exact) / reps)
    print(f"  P(tau_1 > {i}) = {emp:.4f}   exact {exact:.4f}   "
          f"(binomial se {se:.4f})")

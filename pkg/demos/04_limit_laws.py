"""The three limit intensities and sampling their ranked atoms by inversion.

Continuous case: intensity lam x^-2 dx, so the reciprocals of the ranked
atoms form a rate-lam Poisson arrival sequence (i.i.d. exponential
spacings).  Lattice cases: all mass on a geometric grid; atoms repeat.
"""

import math

import numpy as np

from perctree import (ContinuousX2, LatticeLambda, LatticeXi,
                      exponential_rate, ks_test, make_generator,
                      sample_top_atoms)

rng = make_generator(5)
lam = exponential_rate(c=0.5, mu=0.5, alpha=1.0)
print(f"spacing rate for the bst at c = 0.5: lambda = e^-1 = {lam:.6f}")

law = ContinuousX2(lam)
print(f"tail at x = 2: {float(law.tail(2.0)):.6f} (= lambda/2)")

atoms = sample_top_atoms(law, 5, rng)
print(f"top 5 atoms of one draw: {np.round(atoms, 4)}")
recip = 1.0 / atoms
print(f"their reciprocals (arrival times): {np.round(recip, 4)}")

spacings = []
for _ in range(3000):
    a = 1.0 / sample_top_atoms(law, 4, rng)
    spacings.extend([a[0], a[1] - a[0], a[2] - a[1], a[3] - a[2]])
d, p = ks_test(spacings, lambda x: 1.0 - np.exp(-lam * np.asarray(x)))
print(f"KS of 12000 spacings vs Exp(lambda): D = {d:.5f}, p = {p:.4f}")

print()
print("lattice tails are geometric-grid step functions:")
xi = LatticeXi(scale=1.0, span=math.log(2), phase=0.0)
for x in (0.9, 1.0, 1.1, 1.9, 2.0, 2.1):
    print(f"  Xi tail at x = {x:3.1f}: {float(xi.tail(x)):.5f}")
print(f"  (a/(1-e^-a) = 2 ln 2 = {2 * math.log(2):.5f} at x = 1)")

lam_law = LatticeLambda(scale=1.0, d=2, phase=0.0)
print(f"  Lambda tail at x = 1: {float(lam_law.tail(1.0)):.5f} (= d/(d-1) = 2)")

atoms = sample_top_atoms(xi, 12, rng)
print(f"lattice atoms repeat on the grid 2^-m: {np.round(atoms, 4)}")

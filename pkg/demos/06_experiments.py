"""A reduced end-to-end experiment run with report files and gate checks.

The full-scale configurations live in configs/; this demo runs the same
pipeline at n up to 3*10^4 so it finishes in seconds, writes the report
artifacts, and applies the built-in gates (the giant-cluster mean gate is
expected to fail at this scale: the finite-size bias of C0/n is of order
1/ln n, far above the desk-scale tolerance; the trend check is the part
that must hold).
"""

import json
import os

from perctree import ExperimentConfig, run_prop_m, run_theorem1, uniform_binary
from perctree.gates import default_gates

out_dir = os.path.join(os.path.dirname(__file__), "demo_output")
config = ExperimentConfig(
    experiment="theorem1", c=0.5, replications=60, master_seed=20240501,
    vector_spec=uniform_binary(), s=1, s0=1, s1=0,
    n_grid=(1000, 10_000, 30_000), t_grid=(0.0, 0.5, 1.0, 2.0),
    out=out_dir)

report = run_theorem1(config)
print(f"mu = {report.constants['mu']}, target e^(-c/mu) = "
      f"{report.constants['target']:.5f}")
for entry in report.grid:
    print(f"  n = {entry['n']:>6}: mean C0/n = {entry['mean']:.5f} "
          f"+- {entry['stderr']:.5f}  |err| = {entry['abs_error']:.5f}")
for row in report.tests:
    if row["n"] == 30_000:
        print(f"  {row['name']}: D = {row['statistic']:.4f}, "
              f"p = {row['p_value']:.4f}")

print()
print("gate results at this reduced scale:")
for res in default_gates(report):
    print("  " + res.line())

print()
print(f"artifacts written to {out_dir}:")
for name in ("report.json", "report.csv", "records.jsonl"):
    path = os.path.join(out_dir, name)
    print(f"  {name}: {os.path.getsize(path)} bytes")
payload = json.load(open(os.path.join(out_dir, "report.json")))
print(f"  schema version {payload['schema_version']}, "
      f"master seed {payload['master_seed']}")

print()
print("heavy-subtree law of large numbers at the same scale:")
mcfg = ExperimentConfig(
    experiment="prop_m", c=0.5, replications=60, master_seed=20240501,
    vector_spec=uniform_binary(), s=1, s0=1, s1=0,
    n_grid=(1000, 10_000, 30_000), t_grid=(0.0, 0.5, 1.0, 2.0))
mrep = run_prop_m(mcfg)
for row in mrep.tests_named("m_lln"):
    if row["n"] == 30_000 and row["t"] > 0:
        print(f"  t = {row['t']}: M_n(t)/ln n = {row['statistic']:.4f} "
              f"(limit {row['target']:.1f})")

"""
Route coverage with and without pseudo-nodes
============================================

A single vehicle leaves the depot at the centre of a 1 km square, visits a
handful of known hazards and comes back. Its leftover distance budget is
spent on extra waypoints placed by a centroidal Voronoi tessellation. Here
we compare three routes on the same scenarios:

* the original route through the known hazards only,
* pseudo-nodes from a node-based CVT,
* pseudo-nodes from an edge-aware CVT that avoids existing route edges.

Coverage is the fraction of metric cells that some route edge passes through.
"""

import numpy as np

from hazmon import ScenarioSpec, generate_scenario, run_pipeline

spec = ScenarioSpec(n_known=(5, 15), n_pseudo=(1, 5))
methods = ("original", "node-cvt", "edge-cvt")

# %%
# Twenty scenarios are enough to see the ordering; the acceptance run uses 100.
ecr = {m: [] for m in methods}
for trial in range(20):
    scenario = generate_scenario(spec, seed=1000 + trial)
    for row in run_pipeline(scenario, methods, trial=trial):
        ecr[row.method].append(row.ecr)

for m in methods:
    v = np.array(ecr[m])
    print(f"{m:<9s} mean ECR {v.mean():.4f}  (std {v.std(ddof=1):.4f})")

# %%
# The edge-aware CVT wins on most individual scenarios, not just on average.
wins = np.mean(np.array(ecr["edge-cvt"]) > np.array(ecr["original"]))
print(f"edge-cvt beats the original route in {wins:.0%} of scenarios")

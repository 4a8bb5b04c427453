"""
Hybrid schedules, costs and turning points
==========================================
"""

# %%
import numpy as np

from hybridmsd import bloch, planner

# %% [markdown]
# Per-qubit efficiency on the H axis.  The four-copy round wins below the
# crossover, the five-qubit round (after the T-twirl) above it.

# %%
print("crossover p_H =", round(planner.efficiency_crossover(), 4))
for p in (0.75, 0.80, 0.85, 0.90):
    nus = [float(planner.efficiency_on_h_axis(pr, p)) for pr in ("H4", "T5", "H7")]
    print(p, ["%.2e" % v for v in nus])

# %%
s = bloch.state_on_axis(bloch.CANONICAL_H, 0.78)
hybrid = planner.plan_hybrid(s, 0.999)
seven = planner.plan_seven_qubit(s, 0.999)
for rec in hybrid.records("average"):
    print(rec)
print("hybrid: N4 =", hybrid.n4, "N5 =", hybrid.n5,
      "log10 cost =", round(planner.qubit_cost(hybrid, "average"), 2))
print("steane: N7 =", seven.n7, "log10 cost =", round(planner.qubit_cost(seven, "average"), 2))

# %% [markdown]
# Optimal switch point for a range of starting polarizations.

# %%
for p0 in np.arange(0.71, 0.91, 0.02):
    tp = planner.optimal_turning_point(float(p0))
    print(f"p0={p0:.2f}  p*={tp.p_star:.4f}  T5 only={tp.t5_only}")

# %%
print(planner.region_statistics(200))

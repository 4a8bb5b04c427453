"""
One-round maps and their fixed points
=====================================

Run with ``python notebooks/01_maps_and_thresholds.py``.  The first call
builds the five- and seven-qubit tables (a couple of seconds) and caches
them under ``$HYBRIDMSD_CACHE_DIR``.
"""

# %%
import numpy as np

from hybridmsd import maps
from hybridmsd.maps import Protocol

# %% [markdown]
# The four-copy map is closed form; the code maps come from projecting
# equal input copies onto the trivial syndrome.

# %%
grid = np.linspace(0.6, 1.0, 9)
print(f"{'p':>6} {'H4 out':>9} {'T5 out':>9} {'H7 out':>9}")
for p in grid:
    outs = [float(maps.map_arrays(pr, p)[0]) for pr in Protocol]
    print(f"{p:6.3f} " + " ".join(f"{o:9.5f}" for o in outs))

# %% [markdown]
# Thresholds are the unstable fixed points.  The four-copy map also has an
# attracting point below 1, so it cannot reach arbitrarily high polarization.

# %%
lo, hi = maps.h4_fixed_points()
print("H4 fixed points:", round(lo, 6), round(hi, 6))
for pr in (Protocol.T5, Protocol.H7):
    print(pr.value, "threshold:", round(maps.unstable_fixed_point(pr), 6))

# %%
for pr in Protocol:
    rep = maps.convergence_order(pr)
    print(f"{pr.value}: order {rep.order:.3f}, factor {rep.factor:.3f}")

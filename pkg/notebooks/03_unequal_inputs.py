"""
Unequal input copies and the five-input replication
===================================================
"""

# %%
import numpy as np

from hybridmsd import montecarlo

# %%
pts = montecarlo.robustness_surface(np.round(np.linspace(0.68, 0.99, 8), 3), [0.0, 0.04, 0.08],
                                    samples=100, seed=0)
for pt in pts:
    print(f"center={pt.center:.3f} delta={pt.delta:.2f} mean dp={pt.mean_dp:+.5f}")

# %% [markdown]
# Gaussian inputs come out with a higher mean and a narrower spread.

# %%
for mean in (0.778, 0.848, 0.919):
    rep = montecarlo.gaussian_propagation(mean, 0.02, samples=5000, seed=1)
    print(mean, round(rep.output_mean, 4), round(rep.output_sigma, 4))

# %%
for r in montecarlo.experiment_replication():
    print(f"{r.p_in:.3f} -> theory {r.theory_out:.4f}, measured {r.measured_out:.3f}, "
          f"deviation {100 * r.relative_deviation:.2f}%")

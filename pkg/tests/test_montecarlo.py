import numpy as np
import pytest

from hybridmsd import bloch, montecarlo
from hybridmsd.maps import h4_map
from hybridmsd.sim.circuit import h4_circuit


def brute_force_mean_dp(center, delta, samples, seed, cell=0):
    """Oracle: full density-matrix circuit on the same draws."""
    dps = []
    for j in range(samples):
        ps = np.clip(montecarlo.sample_rng(seed, cell, j).uniform(center - delta, center + delta, 4), 0, 1)
        t = h4_circuit([bloch.state_on_axis(bloch.CANONICAL_H, p) for p in ps])
        dps.append(t.p_h[0] - ps.mean())
    return np.mean(dps)


def test_matches_circuit_oracle():
    pt, = montecarlo.robustness_surface([0.68], [0.1], samples=40, seed=3)
    assert pt.mean_dp == pytest.approx(brute_force_mean_dp(0.68, 0.1, 40, 3), abs=1e-12)
    assert pt.mean_dp <= 0


def test_zero_deviation_is_deterministic():
    pt, = montecarlo.robustness_surface([0.826], [0.0], samples=10, seed=1)
    assert pt.mean_dp == h4_map(0.826).p_out - 0.826
    assert pt.std_dp == 0.0


def test_example_point_improves():
    pt, = montecarlo.robustness_surface([0.82], [0.08], samples=200, seed=0)
    assert pt.mean_dp > 0


def test_worker_count_does_not_change_output():
    args = ([0.7, 0.8, 0.9], [0.0, 0.05, 0.2], 30, 11)
    one = montecarlo.robustness_csv(montecarlo.robustness_surface(*args, workers=1))
    three = montecarlo.robustness_csv(montecarlo.robustness_surface(*args, workers=3))
    assert one == three
    assert one == montecarlo.robustness_csv(montecarlo.robustness_surface(*args, workers=1))


def test_robustness_validation():
    with pytest.raises(ValueError):
        montecarlo.robustness_surface([], [0.1])
    with pytest.raises(ValueError):
        montecarlo.robustness_surface([0.8], [0.5])
    with pytest.raises(ValueError):
        montecarlo.robustness_surface([0.8], [0.1], samples=0)


@pytest.mark.parametrize("mean", [0.778, 0.848, 0.919])
def test_gaussian_sharpens_distribution(mean):
    rep = montecarlo.gaussian_propagation(mean, 0.02, samples=4000, seed=5)
    assert rep.output_mean > mean
    assert rep.bin_mass.sum() == pytest.approx(1.0)
    # sigma of the sample standard deviation is about sigma / sqrt(2 n)
    se = rep.output_sigma / np.sqrt(2 * rep.samples)
    assert rep.output_sigma + 3 * se < rep.input_sigma


def test_gaussian_small_sigma_limit():
    rep = montecarlo.gaussian_propagation(0.848, 1e-7, samples=50, seed=0)
    assert rep.output_mean == pytest.approx(h4_map(0.848).p_out, abs=1e-6)
    with pytest.raises(ValueError):
        montecarlo.gaussian_propagation(0.848, 0.0)


def test_experiment_table():
    rows = montecarlo.experiment_replication()
    assert [r.p_in for r in rows] == list(montecarlo.EXPERIMENT_INPUTS)
    improved = {r.p_in: r.improved for r in rows}
    assert improved == {0.661: False, 0.826: True, 0.857: True, 0.885: True, 0.999: False}
    assert max(r.relative_deviation for r in rows) <= 0.02
    assert rows[-1].theory_out == pytest.approx(0.9893, abs=1e-4)


def test_csv_headers_are_stable():
    pts = montecarlo.robustness_surface([0.8], [0.0], samples=1)
    assert montecarlo.robustness_csv(pts).splitlines()[0] == "center,delta,mean_dp,std_dp,samples"
    rep = montecarlo.gaussian_propagation(0.8, 0.02, samples=20, bins=5)
    lines = montecarlo.histogram_csv(rep).splitlines()
    assert lines[0] == "bin_lo,bin_hi,mass" and len(lines) == 6

"""
Sampling studies of the four-copy H-type map with unequal inputs.

Sample ``j`` of grid cell ``i`` draws from its own Philox stream keyed by
``(seed, i, j)``, so results do not depend on how cells are split across
worker processes.  Every cell is reduced in sample order.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .maps import h4_map
from .sim.circuit import h4_branch_batch

SQRT_HALF = 1.0 / math.sqrt(2.0)
DEFAULT_SIGMA = 0.02
EXPERIMENT_INPUTS = (0.661, 0.826, 0.857, 0.885, 0.999)
EXPERIMENT_MEASURED = (0.640, 0.838, 0.867, 0.894, 0.979)
EXPERIMENT_TOLERANCE = 0.02


def sample_rng(seed: int, cell: int, sample: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, cell, sample])))


def _h_axis_inputs(p: np.ndarray) -> np.ndarray:
    """Bloch vectors of shape (..., 3) on the canonical H axis."""
    out = np.zeros(p.shape + (3,))
    out[..., 0] = p * SQRT_HALF
    out[..., 2] = p * SQRT_HALF
    return out


def unequal_h4(p_copies) -> tuple[np.ndarray, np.ndarray]:
    """Branch-0 ``(p_H_out, theta)`` for per-copy H-polarizations of shape (..., 4)."""
    p = np.asarray(p_copies, dtype=float)
    if p.shape[-1] != 4:
        raise ValueError("need four per-copy polarizations")
    theta, vec = h4_branch_batch(_h_axis_inputs(p))
    return (vec[..., 0] + vec[..., 2]) * SQRT_HALF, theta


# -- robustness ------------------------------------------------------------------


@dataclass(frozen=True)
class RobustnessPoint:
    center: float
    delta: float
    samples: int
    mean_dp: float
    std_dp: float


def _robust_cell(args) -> RobustnessPoint:
    i, center, delta, samples, seed = args
    if delta == 0.0:
        r = h4_map(center)
        return RobustnessPoint(center, 0.0, samples, r.p_out - center, 0.0)
    draws = np.array([
        sample_rng(seed, i, j).uniform(center - delta, center + delta, size=4)
        for j in range(samples)
    ])
    draws = np.clip(draws, 0.0, 1.0)
    p_out, _ = unequal_h4(draws)
    dp = p_out - draws.mean(axis=1)
    return RobustnessPoint(center, delta, samples, float(np.mean(dp)), float(np.std(dp)))


def robustness_surface(centers, deviations, samples: int = 100, seed: int = 0,
                       workers: int = 1) -> list[RobustnessPoint]:
    """Mean gain ``p_out - mean(p_copies)`` for copies spread around each center.

    Each copy is drawn uniformly from ``[center - delta, center + delta]``
    and clipped to [0, 1].  Rows are ordered center-major.  ``delta = 0``
    rows use the closed-form map with no sampling.
    """
    centers = [float(c) for c in centers]
    deviations = [float(d) for d in deviations]
    if not centers or not deviations:
        raise ValueError("centers and deviations must be non-empty")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if any(not 0.0 <= c <= 1.0 for c in centers):
        raise ValueError("centers must lie in [0, 1]")
    if any(not 0.0 <= d <= 0.3 for d in deviations):
        raise ValueError("deviations must lie in [0, 0.3]")
    cells = [
        (i, c, d, samples, seed)
        for i, (c, d) in enumerate((c, d) for c in centers for d in deviations)
    ]
    if workers <= 1:
        return [_robust_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_robust_cell, cells, chunksize=max(1, len(cells) // (4 * workers))))


# -- gaussian inputs ------------------------------------------------------------


@dataclass(frozen=True)
class DistributionReport:
    input_mean: float
    input_sigma: float
    samples: int
    output_mean: float
    output_sigma: float
    bin_edges: np.ndarray
    bin_mass: np.ndarray


def gaussian_propagation(mean: float, sigma: float = DEFAULT_SIGMA, samples: int = 10_000,
                         seed: int = 0, bins: int = 40) -> DistributionReport:
    """Push i.i.d. Gaussian per-copy polarizations through the four-copy map.

    Draws are clipped to [0, 1].  ``bin_mass`` is the normalized histogram
    of branch-0 output polarizations.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    if samples < 2:
        raise ValueError("samples must be at least 2")
    if not 0.0 <= mean <= 1.0:
        raise ValueError("mean must lie in [0, 1]")
    draws = np.array([sample_rng(seed, 0, j).normal(mean, sigma, size=4) for j in range(samples)])
    p_out, _ = unequal_h4(np.clip(draws, 0.0, 1.0))
    counts, edges = np.histogram(p_out, bins=bins)
    return DistributionReport(
        input_mean=mean,
        input_sigma=sigma,
        samples=samples,
        output_mean=float(np.mean(p_out)),
        output_sigma=float(np.std(p_out, ddof=1)),
        bin_edges=edges,
        bin_mass=counts / counts.sum(),
    )


# -- experiment ----------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentRow:
    p_in: float
    theory_out: float
    theta: float
    measured_out: float

    @property
    def relative_deviation(self) -> float:
        return abs(self.theory_out - self.measured_out) / self.theory_out

    @property
    def improved(self) -> bool:
        return self.theory_out > self.p_in


def experiment_replication() -> list[ExperimentRow]:
    """Theory outputs for the five reported inputs next to the measured values."""
    rows = []
    for p, measured in zip(EXPERIMENT_INPUTS, EXPERIMENT_MEASURED):
        r = h4_map(p)
        rows.append(ExperimentRow(p, r.p_out, r.theta, measured))
    return rows


# -- csv -------------------------------------------------------------------------

ROBUSTNESS_COLUMNS = ("center", "delta", "mean_dp", "std_dp", "samples")
HISTOGRAM_COLUMNS = ("bin_lo", "bin_hi", "mass")
EXPERIMENT_COLUMNS = ("p_in", "theory_out", "theta", "measured_out", "relative_deviation")


def _fmt(v, precision: int):
    return v if isinstance(v, (int, np.integer)) else f"{v:.{precision}g}"


def robustness_csv(points, precision: int = 17) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROBUSTNESS_COLUMNS)
    for pt in points:
        w.writerow([_fmt(getattr(pt, c), precision) for c in ROBUSTNESS_COLUMNS])
    return buf.getvalue()


def histogram_csv(report: DistributionReport, precision: int = 17) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HISTOGRAM_COLUMNS)
    for lo, hi, m in zip(report.bin_edges[:-1], report.bin_edges[1:], report.bin_mass):
        w.writerow([_fmt(float(v), precision) for v in (lo, hi, m)])
    return buf.getvalue()


def experiment_csv(rows, precision: int = 17) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EXPERIMENT_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c), precision) for c in EXPERIMENT_COLUMNS])
    return buf.getvalue()

"""
Hybrid protocol planning and qubit-cost accounting.

The hybrid protocol sends a noisy state straight to the five-qubit T-type
module when its T-polarization is already high enough.  Otherwise it runs
the four-copy H-type module until the H-polarization passes the turning
point, T-twirls (losing a factor sqrt(2/3)), and finishes with the
five-qubit module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import (
    H_THRESHOLD,
    H_TO_T_FACTOR,
    T5_THRESHOLD,
    BlochVector,
    in_stabilizer_octahedron,
    p_h,
    p_t,
)
from .maps import Protocol, StepResult, h4_fixed_points, map_arrays, step

TURNING_POINT = 0.870
T_SWITCH = 0.655
#: Average per-round success probabilities quoted for the cost estimates.
AVERAGE_THETA = {Protocol.H4: 0.244, Protocol.T5: 0.124, Protocol.H7: 0.046}
MAX_ROUNDS = 10_000


class NotDistillable(ValueError):
    """Input cannot be distilled by any available route."""

    def __init__(self, message: str, predicates: dict | None = None):
        super().__init__(message)
        self.predicates = predicates or {}


class TargetUnreachable(ValueError):
    """The protocol's attracting fixed point lies below the target."""


# -- per-round efficiency ----------------------------------------------------


@dataclass(frozen=True)
class Efficiency:
    nu: float
    distillable: bool


def _in_range(protocol: Protocol, p: float) -> bool:
    if protocol is Protocol.H4:
        return H_THRESHOLD < p < h4_fixed_points()[1]
    return p > protocol.threshold


def efficiency(protocol, p: float) -> Efficiency:
    """Gain per consumed qubit ``(p_out - p) * theta / n`` along the protocol's axis."""
    protocol = Protocol.parse(protocol)
    s = step(protocol, p)
    return Efficiency(s.gain * s.theta / protocol.n, _in_range(protocol, p))


def comparable_efficiency(protocol, ph, pt):
    """Per-round efficiency of a state with H- and T-polarizations ``ph``, ``pt``.

    H4 and T5 are compared in the T direction: an H4 round H-twirls the
    state, raises ``ph`` and is credited with ``sqrt(2/3) * ph_out - pt``,
    the T-polarization it would reach after the T-twirl.  H7 is measured in
    the H direction.  Vectorized; rows outside a protocol's input domain
    get ``-inf``.
    """
    protocol = Protocol.parse(protocol)
    ph = np.asarray(ph, dtype=float)
    pt = np.asarray(pt, dtype=float)
    n = protocol.n
    if protocol is Protocol.H4:
        out, theta = map_arrays(protocol, np.clip(ph, -1.0, 1.0))
        nu = (H_TO_T_FACTOR * out - pt) * theta / n
        return np.where(ph >= 0.0, nu, -np.inf)
    p = ph if protocol is Protocol.H7 else pt
    ok = (p >= 0.0) & (p <= 1.0)
    out, theta = map_arrays(protocol, np.where(ok, p, 0.0))
    return np.where(ok, (out - p) * theta / n, -np.inf)


def efficiency_on_h_axis(protocol, p):
    """Comparable efficiency for a state on the canonical H axis with ``p_H = p``."""
    p = np.asarray(p, dtype=float)
    return comparable_efficiency(protocol, p, H_TO_T_FACTOR * p)


def efficiency_crossover(lo: float = 0.80, hi: float = 0.95) -> float:
    """H-polarization where H4 and T5 efficiencies cross on the H axis."""
    from scipy.optimize import brentq

    g = lambda p: float(efficiency_on_h_axis("H4", p) - efficiency_on_h_axis("T5", p))
    return brentq(g, lo, hi, xtol=1e-12)


# -- traces ------------------------------------------------------------------


@dataclass(frozen=True)
class PlanStep:
    """One distillation round, or a T-twirl event (``protocol`` is None).

    ``p_in``/``p_out`` are polarizations along ``family``'s canonical axis;
    a twirl step reads ``p_in`` as p_H and ``p_out`` as p_T.
    """

    protocol: Protocol | None
    p_in: float
    p_out: float
    theta: float = 1.0

    @property
    def is_twirl(self) -> bool:
        return self.protocol is None

    @property
    def n(self) -> int:
        return 0 if self.protocol is None else self.protocol.n

    @property
    def family(self) -> str:
        return "T" if self.protocol is None else self.protocol.family

    @property
    def name(self) -> str:
        return "DT" if self.protocol is None else self.protocol.value

    @classmethod
    def from_result(cls, r: StepResult) -> "PlanStep":
        return cls(r.protocol, r.p_in, r.p_out, r.theta)


@dataclass
class PlanTrace:
    input: BlochVector
    target: float
    target_family: str = "T"
    steps: list[PlanStep] = field(default_factory=list)

    def distillation_steps(self) -> list[PlanStep]:
        return [s for s in self.steps if not s.is_twirl]

    def count(self, protocol) -> int:
        protocol = Protocol.parse(protocol)
        return sum(1 for s in self.steps if s.protocol is protocol)

    @property
    def n4(self) -> int:
        return self.count(Protocol.H4)

    @property
    def n5(self) -> int:
        return self.count(Protocol.T5)

    @property
    def n7(self) -> int:
        return self.count(Protocol.H7)

    @property
    def final_polarization(self) -> float:
        if not self.steps:
            return p_t(self.input) if self.target_family == "T" else p_h(self.input)
        return self.steps[-1].p_out

    def gain_in_target(self, s: PlanStep) -> float:
        """Polarization gained by ``s``, converted to the target direction."""
        g = s.p_out - s.p_in
        if s.family == "H" and self.target_family == "T":
            g *= H_TO_T_FACTOR
        return g

    def records(self, mode: str = "step"):
        """One dict per step with the running log10 qubit cost."""
        cost = 0.0
        for s in self.steps:
            if not s.is_twirl:
                cost += _log10_factor(s, mode)
            yield {
                "protocol": s.name,
                "p_in": s.p_in,
                "p_out": s.p_out,
                "theta": s.theta,
                "log10_cost": cost,
            }


def _log10_factor(s: PlanStep, mode: str) -> float:
    if mode == "step":
        theta = s.theta
    elif mode == "average":
        theta = AVERAGE_THETA[s.protocol]
    else:
        raise ValueError("mode must be 'step' or 'average'")
    if theta <= 0.0:
        return math.inf
    return math.log10(s.n / theta)


def qubit_cost(trace: PlanTrace, mode: str = "step") -> float:
    """log10 of the expected number of noisy inputs per output state.

    ``mode="step"`` multiplies ``n_i / theta_i`` over executed rounds;
    ``mode="average"`` uses the fixed averages in :data:`AVERAGE_THETA`.
    Returns ``inf`` when any round has zero success probability.
    """
    return sum(_log10_factor(s, mode) for s in trace.distillation_steps())


def whole_efficiency(trace: PlanTrace) -> float:
    """Total gain divided by total expected qubit consumption."""
    steps = trace.distillation_steps()
    if not steps:
        raise ValueError("whole_efficiency needs at least one distillation round")
    gain = sum(trace.gain_in_target(s) for s in steps)
    consumption = math.prod(s.n / s.theta for s in steps)
    return gain / consumption


# -- iteration ---------------------------------------------------------------


def iterations_to_target(p0: float, protocol, target: float) -> int:
    """Smallest ``k`` with ``map^k(p0) >= target`` under the mean-map dynamics."""
    protocol = Protocol.parse(protocol)
    if not target < 1.0:
        raise ValueError("target polarization must be below 1")
    if p0 >= target:
        return 0
    if p0 <= protocol.threshold:
        raise NotDistillable(f"p = {p0} is not above the {protocol.value} threshold")
    if protocol is Protocol.H4:
        upper = h4_fixed_points()[1]
        if target >= upper or p0 >= upper:
            raise TargetUnreachable(
                f"H4 converges to {upper:.4f} and cannot reach {target}"
            )
    p, k = p0, 0
    while p < target:
        p = step(protocol, p).p_out
        k += 1
        if k > MAX_ROUNDS:
            raise TargetUnreachable("iteration limit reached")
    return k


def _iterate(trace: PlanTrace, protocol: Protocol, p: float, target: float) -> float:
    rounds = 0
    while p < target:
        r = step(protocol, p)
        if r.p_out <= p:
            raise TargetUnreachable(f"{protocol.value} stalls at p = {p:.6f}")
        trace.steps.append(PlanStep.from_result(r))
        p = r.p_out
        rounds += 1
        if rounds > MAX_ROUNDS:
            raise TargetUnreachable("iteration limit reached")
    return p


def plan_hybrid(
    state: BlochVector,
    target_pt: float = 0.999,
    turning_point: float = TURNING_POINT,
    switch_pt: float = T_SWITCH,
) -> PlanTrace:
    """Route ``state`` through the hybrid protocol to ``p_T >= target_pt``.

    Inputs with ``p_T >= switch_pt`` go straight to the five-qubit module.
    Otherwise, if ``p_H`` is above 1/sqrt(2), H4 rounds run until
    ``p_H >= turning_point``, a T-twirl converts to ``p_T``, and five-qubit
    rounds finish the job.  Inputs failing both tests but still above the
    five-qubit threshold go to the five-qubit module directly.

    Raises
    ------
    NotDistillable
        If the state is inside the stabilizer octahedron or below every
        threshold.  ``exc.predicates`` records the failing tests.
    """
    if not target_pt < 1.0:
        raise ValueError("target polarization must be below 1")
    ph, pt = p_h(state), p_t(state)
    predicates = {
        "outside_octahedron": not in_stabilizer_octahedron(state),
        "p_T_above_threshold": pt > T5_THRESHOLD,
        "p_H_above_threshold": ph > H_THRESHOLD,
    }
    if not predicates["outside_octahedron"]:
        raise NotDistillable("state lies inside the stabilizer octahedron", predicates)

    trace = PlanTrace(state, target_pt, "T")
    if pt >= switch_pt:
        _iterate(trace, Protocol.T5, pt, target_pt)
    elif predicates["p_H_above_threshold"]:
        if turning_point >= h4_fixed_points()[1]:
            raise TargetUnreachable("turning point lies above the H4 fixed point")
        p = _iterate(trace, Protocol.H4, ph, turning_point)
        q = H_TO_T_FACTOR * p
        trace.steps.append(PlanStep(None, p, q))
        if q <= T5_THRESHOLD:
            raise NotDistillable("turning point too low for the five-qubit module", predicates)
        _iterate(trace, Protocol.T5, q, target_pt)
    elif predicates["p_T_above_threshold"]:
        _iterate(trace, Protocol.T5, pt, target_pt)
    else:
        raise NotDistillable("no protocol threshold is exceeded", predicates)
    return trace


def plan_seven_qubit(state: BlochVector, target_ph: float = 0.999) -> PlanTrace:
    """Steane-code-only schedule to ``p_H >= target_ph``."""
    if not target_ph < 1.0:
        raise ValueError("target polarization must be below 1")
    ph = p_h(state)
    if ph <= H_THRESHOLD:
        raise NotDistillable("p_H is not above 1/sqrt(2)", {"p_H_above_threshold": False})
    trace = PlanTrace(state, target_ph, "H")
    _iterate(trace, Protocol.H7, ph, target_ph)
    return trace


def average_success_probabilities(points: int = 2001) -> dict[Protocol, float]:
    """Uniform averages of theta over each protocol's distillable range."""
    upper = h4_fixed_points()[1]
    ranges = {
        Protocol.H4: (H_THRESHOLD, upper),
        Protocol.T5: (T5_THRESHOLD, 1.0),
        Protocol.H7: (H_THRESHOLD, 1.0),
    }
    return {
        pr: float(np.mean(map_arrays(pr, np.linspace(a, b, points))[1]))
        for pr, (a, b) in ranges.items()
    }


# -- turning-point optimization ----------------------------------------------


def fractional_iterations(protocol, p: float, target: float) -> float:
    """Iteration count with the last round prorated in ``log(1 - p)``.

    Makes the count continuous in both ``p`` and ``target``: the final
    round contributes the fraction of its log-error reduction needed to
    hit the target exactly.
    """
    protocol = Protocol.parse(protocol)
    if p >= target:
        return 0.0
    k = 0
    while True:
        q = float(map_arrays(protocol, p)[0])
        if q <= p:
            return math.inf
        if q >= target:
            return k + math.log((1 - p) / (1 - target)) / math.log((1 - p) / (1 - q))
        p = q
        k += 1
        if k > MAX_ROUNDS:
            return math.inf


@dataclass(frozen=True)
class TurningPoint:
    p0: float
    p_star: float
    log10_cost: float
    t5_only: bool


def optimal_turning_point(
    p0: float,
    target_pt: float = 0.999,
    resolution: int = 400,
    average_theta: dict | None = None,
) -> TurningPoint:
    """Switch polarization minimizing average-mode cost from ``p0`` on the H axis.

    Candidates are ``p0`` itself (T-twirl at once, five-qubit only) and a
    uniform grid up to the H4 fixed point.  Costs use
    :func:`fractional_iterations` so the objective is continuous in the
    candidate.
    """
    if not H_THRESHOLD < p0 < 1.0:
        raise NotDistillable(f"p0 = {p0} is outside the H4 distillable range")
    theta = AVERAGE_THETA if average_theta is None else average_theta
    l4 = math.log10(4 / theta[Protocol.H4])
    l5 = math.log10(5 / theta[Protocol.T5])
    upper = h4_fixed_points()[1]
    candidates = [p0]
    if p0 < upper:
        candidates += list(np.linspace(p0, upper, resolution, endpoint=False)[1:])

    best = (math.inf, p0)
    for p_star in candidates:
        q = H_TO_T_FACTOR * p_star
        if q <= T5_THRESHOLD:
            continue
        n4 = fractional_iterations(Protocol.H4, p0, p_star) if p_star > p0 else 0.0
        cost = n4 * l4 + fractional_iterations(Protocol.T5, q, target_pt) * l5
        if cost < best[0]:
            best = (cost, float(p_star))
    if not math.isfinite(best[0]):
        raise TargetUnreachable(f"no turning point reaches p_T = {target_pt} from {p0}")
    return TurningPoint(float(p0), best[1], best[0], best[1] == p0)


# -- region statistics ---------------------------------------------------------


@dataclass(frozen=True)
class RegionStats:
    """Fractions of the positive octant of the Bloch ball, by uniform volume.

    ``five_less_efficient``: share of A_T and A_H where one H4 round beats one
    T5 round in comparable efficiency.  ``seven_better``: share of the
    distillable set where the Steane-only schedule (to p_H >= 0.99) costs
    fewer qubits than the hybrid route (to p_T >= 0.999).  ``case4_direct``:
    share of ``0.655 < p_T < 0.71, 0.707 < p_H < 0.87`` where a T5 round is
    more efficient than an H4 round.
    """

    resolution: int
    n_distillable: int
    n_overlap: int
    n_case4: int
    five_less_efficient: float
    seven_better: float
    case4_direct: float


def octant_grid(resolution: int):
    """Cell centers of a ``resolution**3`` grid on the positive octant, inside the ball."""
    ax = (np.arange(resolution) + 0.5) / resolution
    x, y, z = (a.ravel() for a in np.meshgrid(ax, ax, ax, indexing="ij"))
    inside = x * x + y * y + z * z <= 1.0
    return x[inside], y[inside], z[inside]


def _count_rounds(protocol: Protocol, p: np.ndarray, target: float, active: np.ndarray):
    p = p.copy()
    n = np.zeros(p.shape)
    run = active & (p < target)
    for _ in range(MAX_ROUNDS):
        if not run.any():
            break
        p[run] = map_arrays(protocol, p[run])[0]
        n[run] += 1
        run &= p < target
    return n, p


def routed_cost(ph, pt, target_pt: float = 0.999):
    """Vectorized average-mode log10 cost of :func:`plan_hybrid`; ``inf`` if undistillable."""
    ph = np.asarray(ph, dtype=float)
    pt = np.asarray(pt, dtype=float)
    l4 = math.log10(4 / AVERAGE_THETA[Protocol.H4])
    l5 = math.log10(5 / AVERAGE_THETA[Protocol.T5])
    direct = pt >= T_SWITCH
    via_h4 = ~direct & (ph > H_THRESHOLD)
    fallback = ~direct & ~via_h4 & (pt > T5_THRESHOLD)

    n4, p_turn = _count_rounds(Protocol.H4, ph, TURNING_POINT, via_h4)
    start = np.where(via_h4, H_TO_T_FACTOR * p_turn, pt)
    t5_active = direct | via_h4 | fallback
    n5, _ = _count_rounds(Protocol.T5, np.clip(start, 0.0, 1.0), target_pt, t5_active)
    cost = n4 * l4 + n5 * l5
    return np.where(t5_active, cost, np.inf)


def region_statistics(resolution: int = 200, seven_target: float = 0.99,
                      hybrid_target: float = 0.999) -> RegionStats:
    if resolution < 50:
        raise ValueError("resolution must be at least 50 per axis")
    x, y, z = octant_grid(resolution)
    ph = (x + z) / math.sqrt(2.0)
    pt = (x + y + z) / math.sqrt(3.0)
    a_t = pt > T5_THRESHOLD
    a_h = ph > H_THRESHOLD
    distillable = a_t | a_h
    overlap = a_t & a_h
    case4 = (pt > T_SWITCH) & (pt < 0.71) & (ph > 0.707) & (ph < TURNING_POINT)

    nu4 = comparable_efficiency(Protocol.H4, ph, pt)
    nu5 = comparable_efficiency(Protocol.T5, ph, pt)
    five_worse = nu4 > nu5

    l7 = math.log10(7 / AVERAGE_THETA[Protocol.H7])
    n7, _ = _count_rounds(Protocol.H7, ph, seven_target, a_h)
    c7 = np.where(a_h, n7 * l7, np.inf)
    seven = c7 < routed_cost(ph, pt, hybrid_target)

    def frac(mask, within):
        total = int(within.sum())
        return float((mask & within).sum() / total) if total else 0.0

    return RegionStats(
        resolution=resolution,
        n_distillable=int(distillable.sum()),
        n_overlap=int(overlap.sum()),
        n_case4=int(case4.sum()),
        five_less_efficient=frac(five_worse, overlap),
        seven_better=frac(seven, distillable),
        case4_direct=frac(~five_worse, case4),
    )

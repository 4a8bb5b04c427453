import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridmsd import bloch, planner
from hybridmsd.bloch import BlochVector
from hybridmsd.maps import Protocol, h4_fixed_points
from hybridmsd.planner import PlanStep, PlanTrace


def h_state(p):
    return bloch.state_on_axis(bloch.CANONICAL_H, p)


def test_efficiency_sign_and_flag():
    e = planner.efficiency("H4", 0.826)
    assert e.distillable and e.nu > 0
    assert not planner.efficiency("H4", 0.70).distillable
    assert planner.efficiency("H4", 0.70).nu < 0
    assert not planner.efficiency("H4", 0.98).distillable


def test_crossover_is_unique_in_band():
    grid = np.linspace(0.7072, h4_fixed_points()[1] - 1e-4, 2000)
    diff = planner.efficiency_on_h_axis("H4", grid) - planner.efficiency_on_h_axis("T5", grid)
    assert np.count_nonzero(np.diff(np.sign(diff))) == 1
    assert planner.efficiency_crossover() == pytest.approx(0.870, abs=0.005)


def test_h4_beats_h7_at_075():
    assert planner.efficiency_on_h_axis("H4", 0.75) > planner.efficiency_on_h_axis("H7", 0.75)


def test_routes():
    assert planner.plan_hybrid(bloch.state_on_axis(bloch.CANONICAL_T, 0.9)).n4 == 0
    t = planner.plan_hybrid(h_state(0.78))
    names = [s.name for s in t.steps]
    assert names.count("DT") == 1
    assert names.index("DT") == t.n4
    assert t.final_polarization >= 0.999
    with pytest.raises(planner.NotDistillable) as err:
        planner.plan_hybrid(BlochVector(0.3, 0.3, 0.3))
    assert err.value.predicates["outside_octahedron"] is False
    with pytest.raises(planner.NotDistillable):
        planner.plan_hybrid(BlochVector(0.9, -0.3, 0.0))


def test_fallback_to_t5_when_h_below_threshold():
    # p_T above the five-qubit threshold but below the switch point, p_H under 1/sqrt(2)
    s = BlochVector.from_array(np.array([0.2, 0.634, 0.3]))
    assert bloch.T5_THRESHOLD < bloch.p_t(s) < planner.T_SWITCH
    assert bloch.p_h(s) < bloch.H_THRESHOLD
    t = planner.plan_hybrid(s)
    assert t.n4 == 0 and t.n5 > 0


def test_hybrid_plan_at_078_counts():
    t = planner.plan_hybrid(h_state(0.78))
    assert t.n5 == 5
    assert planner.plan_seven_qubit(h_state(0.78)).n7 == pytest.approx(26, abs=1)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.72, 0.995))
def test_plans_chain(p):
    for t in (planner.plan_hybrid(h_state(p)), planner.plan_seven_qubit(h_state(p))):
        for a, b in zip(t.steps, t.steps[1:]):
            assert b.p_in == pytest.approx(a.p_out, abs=1e-12)
        for s in t.steps:
            if s.is_twirl:
                assert s.p_out == pytest.approx(s.p_in * bloch.H_TO_T_FACTOR)
                assert s.n == 0


def test_qubit_cost_modes():
    t = planner.plan_hybrid(h_state(0.78))
    avg = planner.qubit_cost(t, "average")
    assert avg == pytest.approx(t.n4 * math.log10(4 / 0.244) + t.n5 * math.log10(5 / 0.124))
    step_cost = sum(math.log10(s.n / s.theta) for s in t.distillation_steps())
    assert planner.qubit_cost(t, "step") == pytest.approx(step_cost)
    with pytest.raises(ValueError):
        planner.qubit_cost(t, "median")
    dead = PlanTrace(h_state(0.8), 0.9, "H", [PlanStep(Protocol.H4, 0.8, 0.81, 0.0)])
    assert planner.qubit_cost(dead) == math.inf


def test_whole_efficiency():
    t = planner.plan_hybrid(bloch.state_on_axis(bloch.CANONICAL_T, 0.9))
    gain = t.final_polarization - 0.9
    consumption = math.prod(s.n / s.theta for s in t.steps)
    assert planner.whole_efficiency(t) == pytest.approx(gain / consumption)
    with pytest.raises(ValueError):
        planner.whole_efficiency(PlanTrace(h_state(0.8), 0.9))


def test_iterations_to_target():
    assert planner.iterations_to_target(0.9, "T5", 0.8) == 0
    assert planner.iterations_to_target(0.78, "H7", 0.999) == planner.plan_seven_qubit(h_state(0.78)).n7
    with pytest.raises(planner.TargetUnreachable):
        planner.iterations_to_target(0.8, "H4", 0.99)
    with pytest.raises(planner.NotDistillable):
        planner.iterations_to_target(0.6, "T5", 0.9)
    with pytest.raises(ValueError):
        planner.iterations_to_target(0.8, "T5", 1.0)


def test_fractional_iterations_bracket_integer_counts():
    n = planner.iterations_to_target(0.8, "T5", 0.999)
    f = planner.fractional_iterations("T5", 0.8, 0.999)
    assert n - 1 < f <= n
    assert planner.fractional_iterations("T5", 0.95, 0.9) == 0.0


@pytest.mark.parametrize("p0", [0.72, 0.76, 0.80, 0.84])
def test_optimal_turning_point_cluster(p0):
    tp = planner.optimal_turning_point(p0, resolution=200)
    assert 0.83 <= tp.p_star <= 0.87
    assert not tp.t5_only


def test_high_start_goes_straight_to_t5():
    assert planner.optimal_turning_point(0.9, resolution=100).t5_only
    with pytest.raises(planner.NotDistillable):
        planner.optimal_turning_point(0.7)


def test_average_success_probabilities():
    avg = planner.average_success_probabilities(501)
    assert avg[Protocol.H4] == pytest.approx(0.244, abs=0.005)
    assert avg[Protocol.H7] == pytest.approx(0.046, abs=0.005)
    assert 0.10 < avg[Protocol.T5] < 0.13


def test_region_statistics_small_grid():
    st_ = planner.region_statistics(60)
    assert 0 <= st_.five_less_efficient < 0.05
    assert st_.case4_direct > 0.8
    assert st_.n_overlap < st_.n_distillable
    with pytest.raises(ValueError):
        planner.region_statistics(10)


def test_routed_cost_matches_plan():
    for p in (0.75, 0.8, 0.9):
        s = h_state(p)
        want = planner.qubit_cost(planner.plan_hybrid(s), "average")
        got = planner.routed_cost(np.array([bloch.p_h(s)]), np.array([bloch.p_t(s)]))[0]
        assert got == pytest.approx(want)

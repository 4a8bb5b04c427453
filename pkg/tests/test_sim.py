from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridmsd import bloch
from hybridmsd.sim import circuit, codes, states
from hybridmsd.sim.states import PauliString


def unit_ball(draw_vec):
    v = np.array(draw_vec)
    n = np.linalg.norm(v)
    return bloch.BlochVector.from_array(v / n * min(n, 1.0)) if n > 0 else bloch.BlochVector(0, 0, 0)


vec = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).map(unit_ball)


# -- states ------------------------------------------------------------------


def test_pauli_parse_and_commutation():
    p = PauliString.parse("-xzzxi")
    assert p.sign == -1 and p.letters == "XZZXI"
    assert PauliString("XX").commutes_with(PauliString("ZZ"))
    assert not PauliString("XI").commutes_with(PauliString("ZI"))
    with pytest.raises(ValueError):
        PauliString("XQ")


def test_embed_matches_kron_on_adjacent_wires():
    u = states.embed(states.CNOT, [1, 2], 3)
    assert np.allclose(u, np.kron(np.eye(2), states.CNOT))
    rev = states.cnot(1, 0, 2)
    assert np.allclose(rev @ np.kron(states.I2, states.X) @ rev, np.kron(states.X, states.X))


def test_product_state_limits():
    with pytest.raises(ValueError):
        states.product_state([])
    with pytest.raises(ValueError):
        states.product_state([bloch.BlochVector(0, 0, 1)] * 9)


def test_measurement_and_impossible_outcome():
    zero = states.product_state([bloch.BlochVector(0, 0, 1)])
    post, prob = states.measure_projective(zero, PauliString("Z"), 1)
    assert prob == pytest.approx(1.0)
    with pytest.raises(states.ImpossibleOutcome):
        states.measure_projective(zero, PauliString("Z"), -1)


def test_clifford_rotations():
    rots = states.CLIFFORD_ROTATIONS
    assert len(rots) == 24
    assert np.allclose(rots[0], np.eye(3))
    for r in rots:
        assert np.allclose(r @ r.T, np.eye(3))
        assert round(np.linalg.det(r)) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(vec, min_size=1, max_size=4), st.sampled_from("XYZ"), st.sampled_from([1, -1]))
def test_operations_preserve_density_validity(vs, letter, keep):
    rho = states.product_state(vs)
    n = len(vs)
    states.check_density(rho)
    if n >= 2:
        rho = states.apply_unitary(rho, states.cnot(0, n - 1, n))
        states.check_density(rho)
    try:
        post, _ = states.measure_projective(rho, PauliString.single(letter, 0, n), keep)
    except states.ImpossibleOutcome:
        return
    states.check_density(post)
    for q in range(n):
        states.check_density(states.partial_trace_keep(post, [q]))


@given(vec)
def test_bloch_density_round_trip(s):
    back = states.bloch_from_density(states.density_from_bloch(s))
    assert np.allclose(back.as_array(), s.as_array(), atol=1e-12)


# -- four-copy circuit ----------------------------------------------------------


def closed_form_exact(p: Fraction):
    """Independent rational evaluation of the closed form."""
    den = 2 + 2 * p**2 + p**4
    return (6 * p**2 + p**4) / den, den / 16


def test_h4_circuit_matches_closed_form_on_grid():
    for p in np.linspace(0, 1, 101):
        t = circuit.h4_circuit([bloch.state_on_axis(bloch.CANONICAL_H, p)] * 4)
        ratio, theta = closed_form_exact(Fraction(float(p)))
        assert abs(t.theta[0] - float(theta)) < 1e-10
        assert abs(t.p_h[0] - float(ratio) / np.sqrt(2)) < 1e-10
        assert t.theta.sum() == pytest.approx(1.0, abs=1e-12)


def test_h4_success_probability_example():
    t = circuit.h4_circuit([bloch.state_on_axis(bloch.CANONICAL_H, 0.826)] * 4)
    assert t.success_probability == pytest.approx(0.239378, abs=1e-6)
    assert t.p_h[0] == pytest.approx(0.841714, abs=1e-6)


def test_pure_magic_inputs_lose_polarization():
    t = circuit.h4_circuit([bloch.state_on_axis(bloch.CANONICAL_H, 1.0)] * 4)
    assert t.p_h[0] == pytest.approx(7 / (5 * np.sqrt(2)), abs=1e-12)
    assert t.theta[0] == pytest.approx(5 / 16)


@settings(max_examples=25, deadline=None)
@given(st.lists(vec, min_size=4, max_size=4))
def test_h4_branches_on_h_axis_and_batch_agrees(vs):
    t = circuit.h4_circuit(vs)
    live = t.theta > 1e-12
    b = t.bloch[live]
    assert np.allclose(b[:, 0], b[:, 2], atol=1e-12)
    assert np.allclose(b[:, 1], 0.0, atol=1e-12)
    theta, raw = circuit.h4_branch_batch(np.array([v.as_array() for v in vs]))
    assert theta == pytest.approx(t.theta[0], abs=1e-12)
    if t.theta[0] > 1e-12:
        assert np.allclose(raw, t.raw_bloch[0], atol=1e-9)


def test_layout_validation():
    with pytest.raises(ValueError):
        circuit.H4Layout((circuit.ParityCheck(0, 1, "Z"), circuit.ParityCheck(1, 2, "Z"),
                          circuit.ParityCheck(0, 2, "X")))
    with pytest.raises(ValueError):
        circuit.ParityCheck(0, 0, "Z")


def test_calibration_finds_one_layout_class():
    matches = circuit.calibrate_h4_layout(grid_points=21)
    assert circuit.H4_LAYOUT in matches
    assert {circuit.layout_signature(m) for m in matches} == {circuit.layout_signature(circuit.H4_LAYOUT)}
    assert len(matches) == 96


# -- codes --------------------------------------------------------------------------


def test_code_spec_validation():
    with pytest.raises(ValueError):
        codes.CodeSpec("bad", (PauliString("XI"), PauliString("ZI")), PauliString("XX"),
                       PauliString("ZZ"), "T")
    with pytest.raises(ValueError):
        codes.CodeSpec("dup", (PauliString("ZZ"), PauliString("ZZ")), PauliString("XX"),
                       PauliString("ZI"), "H")


@pytest.mark.parametrize("code", [codes.FIVE_QUBIT_CODE, codes.STEANE_CODE])
def test_frozen_corrections_match_calibration(code):
    assert codes.calibrate_correction(code) == code.correction


@pytest.mark.parametrize("code,threshold", [
    (codes.FIVE_QUBIT_CODE, np.sqrt(3 / 7)),
    (codes.STEANE_CODE, 1 / np.sqrt(2)),
])
def test_code_thresholds_are_fixed_points(code, threshold):
    p_out, weight = codes.equal_input_distill(code, threshold)
    assert p_out == pytest.approx(threshold, abs=1e-12)
    assert 0 < weight < 1
    assert codes.equal_input_distill(code, threshold + 0.02)[0] > threshold + 0.02
    assert codes.equal_input_distill(code, threshold - 0.02)[0] < threshold - 0.02


@pytest.mark.parametrize("code", [codes.FIVE_QUBIT_CODE, codes.STEANE_CODE])
def test_pure_inputs_are_fixed(code):
    assert codes.equal_input_distill(code, 1.0)[0] == pytest.approx(1.0, abs=1e-12)
    assert codes.equal_input_distill(code, 0.0)[0] == pytest.approx(0.0, abs=1e-12)


def test_five_qubit_success_probability_at_pure_input():
    # |T> on five copies: the trivial syndrome has weight 1/6
    assert codes.equal_input_distill(codes.FIVE_QUBIT_CODE, 1.0)[1] == pytest.approx(1 / 6)


def test_wrong_input_count():
    with pytest.raises(ValueError):
        codes.code_distill(codes.STEANE_CODE, [bloch.BlochVector(0, 0, 1)] * 5)


def test_unequal_copies_from_one_experimental_set():
    ps = (0.817, 0.823, 0.797, 0.808)
    t = circuit.h4_circuit([bloch.state_on_axis(bloch.CANONICAL_H, p) for p in ps])
    equal = circuit.h4_closed_form(np.mean(ps))
    assert t.p_h[0] > np.mean(ps)
    assert t.p_h[0] == pytest.approx(float(equal[0]), abs=2e-3)
    assert t.theta[0] == pytest.approx(float(equal[1]), abs=2e-3)

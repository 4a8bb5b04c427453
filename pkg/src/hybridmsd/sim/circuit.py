"""
Four-copy H-type distillation as an explicit Clifford circuit.

The circuit merges four noisy H-type copies with three pairwise parity
checks.  A check on wires ``(a, b)`` in basis ``B`` is a CNOT in the ``B``
frame followed by a measurement of wire ``b`` in that basis, so outcome 0
(eigenvalue +1) means even ``B B`` parity and wire ``a`` survives.  After
three checks one wire remains and is H-twirled; the all-zero outcome is
the success branch.

The exact wiring is pinned by :func:`calibrate_h4_layout`, which searches
all three-check layouts with bases in {X, Z} for the ones reproducing the
closed-form map.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..bloch import BlochVector, twirl_h
from .states import (
    HADAMARD,
    I2,
    ImpossibleOutcome,
    PauliString,
    apply_unitary,
    bloch_from_density,
    cnot,
    embed,
    measure_projective,
    partial_trace_keep,
    product_state,
)

N_WIRES = 4


@dataclass(frozen=True)
class ParityCheck:
    survivor: int
    measured: int
    basis: str  # "X" or "Z"

    def __post_init__(self):
        if self.basis not in ("X", "Z"):
            raise ValueError("parity-check basis must be 'X' or 'Z'")
        if self.survivor == self.measured:
            raise ValueError("parity check needs two distinct wires")

    def unitary(self, n: int = N_WIRES) -> np.ndarray:
        u = cnot(self.survivor, self.measured, n)
        if self.basis == "X":
            h = embed(np.kron(HADAMARD, HADAMARD), [self.survivor, self.measured], n)
            u = h @ u @ h
        return u

    def observable(self, n: int = N_WIRES) -> PauliString:
        return PauliString.single(self.basis, self.measured, n)


@dataclass(frozen=True)
class H4Layout:
    checks: tuple[ParityCheck, ParityCheck, ParityCheck]

    def __post_init__(self):
        live = set(range(N_WIRES))
        for c in self.checks:
            if c.survivor not in live or c.measured not in live:
                raise ValueError(f"check {c} touches an already-measured wire")
            live.discard(c.measured)

    @property
    def survivor(self) -> int:
        measured = {c.measured for c in self.checks}
        (s,) = set(range(N_WIRES)) - measured
        return s

    @property
    def measured_wires(self) -> tuple[int, ...]:
        """Measured wires in ascending order; this fixes the outcome bit order."""
        return tuple(sorted(c.measured for c in self.checks))

    def describe(self) -> str:
        return ", ".join(
            f"{c.basis}{c.basis}({c.survivor},{c.measured})" for c in self.checks
        )


#: ZZ checks on (0,1) and (2,3), then XX on the survivors (0,2).
H4_LAYOUT = H4Layout(
    (ParityCheck(0, 1, "Z"), ParityCheck(2, 3, "Z"), ParityCheck(0, 2, "X"))
)


@dataclass
class OutcomeTable:
    """Probabilities and surviving-qubit states for all eight outcomes.

    ``theta[i]`` is the probability that the measured wires read the bits of
    ``i`` (first measured wire is the most significant bit).  ``bloch[i]``
    is the surviving qubit after the H-twirl and ``raw_bloch[i]`` before
    it; both are NaN where the branch is impossible.
    """

    theta: np.ndarray
    bloch: np.ndarray
    raw_bloch: np.ndarray
    layout: H4Layout = field(default=H4_LAYOUT)

    def branch(self, i: int) -> BlochVector:
        if self.theta[i] == 0.0:
            raise ImpossibleOutcome(f"branch {i} has zero probability")
        return BlochVector.from_array(self.bloch[i])

    @property
    def x(self) -> np.ndarray:
        return self.bloch[:, 0]

    @property
    def z(self) -> np.ndarray:
        return self.bloch[:, 2]

    @property
    def p_h(self) -> np.ndarray:
        return (self.bloch[:, 0] + self.bloch[:, 2]) / np.sqrt(2.0)

    @property
    def success_probability(self) -> float:
        return float(self.theta[0])

    def distilled(self) -> BlochVector:
        """Branch-0 output (already H-twirled)."""
        return self.branch(0)


def h4_circuit(inputs: Sequence[BlochVector], layout: H4Layout = H4_LAYOUT) -> OutcomeTable:
    """Simulate the four-copy parity-check circuit on explicit input states.

    Every branch is followed through sequential projective measurements on
    the full 16 x 16 density matrix.
    """
    inputs = list(inputs)
    if len(inputs) != N_WIRES:
        raise ValueError("h4_circuit needs exactly four input states")
    rho = product_state(inputs)
    theta = np.zeros(8)
    bloch = np.full((8, 3), np.nan)
    raw = np.full((8, 3), np.nan)
    order = layout.measured_wires
    survivor = layout.survivor

    for bits in itertools.product((0, 1), repeat=3):
        outcome = dict(zip(order, bits))
        state, prob = rho, 1.0
        try:
            for check in layout.checks:
                state = apply_unitary(state, check.unitary())
                keep = 1 if outcome[check.measured] == 0 else -1
                state, p = measure_projective(state, check.observable(), keep)
                prob *= p
        except ImpossibleOutcome:
            continue
        i = int("".join(map(str, bits)), 2)
        theta[i] = prob
        out = bloch_from_density(partial_trace_keep(state, [survivor]))
        raw[i] = out.as_array()
        bloch[i] = twirl_h(out).as_array()
    return OutcomeTable(theta, bloch, raw, layout)


@lru_cache(maxsize=64)
def branch_kraus(layout: H4Layout = H4_LAYOUT, outcome: int = 0) -> np.ndarray:
    """2 x 16 Kraus operator taking the input register to the survivor.

    Equivalent to :func:`h4_circuit` for one branch; used for batched
    evaluation of many input tuples.
    """
    bits = [(outcome >> (2 - k)) & 1 for k in range(3)]
    outcome_of = dict(zip(layout.measured_wires, bits))
    n = N_WIRES
    k = np.eye(2**n, dtype=complex)
    for check in layout.checks:
        keep = 1 if outcome_of[check.measured] == 0 else -1
        proj = (np.eye(2**n) + keep * check.observable(n).matrix()) / 2.0
        k = proj @ check.unitary(n) @ k
    # measured wires are now in definite basis states; read off the survivor
    basis_vecs = []
    for w in range(n):
        if w == layout.survivor:
            basis_vecs.append(I2)
            continue
        check = next(c for c in layout.checks if c.measured == w)
        b = outcome_of[w]
        v = np.eye(2, dtype=complex)[b]
        if check.basis == "X":
            v = HADAMARD @ v
        basis_vecs.append(v.reshape(1, 2).conj())
    # assemble bra over measured wires with identity on the survivor
    out = np.ones((1, 1), dtype=complex)
    for op in basis_vecs:
        out = np.kron(out, op)
    return out @ k


def _single_densities(bloch: np.ndarray) -> np.ndarray:
    x, y, z = bloch[..., 0], bloch[..., 1], bloch[..., 2]
    rho = np.empty(bloch.shape[:-1] + (2, 2), dtype=complex)
    rho[..., 0, 0] = (1 + z) / 2
    rho[..., 1, 1] = (1 - z) / 2
    rho[..., 0, 1] = (x - 1j * y) / 2
    rho[..., 1, 0] = (x + 1j * y) / 2
    return rho


def h4_branch_batch(bloch_inputs, layout: H4Layout = H4_LAYOUT, outcome: int = 0):
    """Branch probabilities and survivor Bloch vectors for a batch of inputs.

    Parameters
    ----------
    bloch_inputs : array_like, shape (..., 4, 3)
        Bloch vectors of the four copies.

    Returns
    -------
    theta : ndarray, shape (...)
    bloch : ndarray, shape (..., 3)
        Survivor state before the H-twirl; NaN where ``theta`` is zero.
    """
    b = np.asarray(bloch_inputs, dtype=float)
    if b.shape[-2:] != (4, 3):
        raise ValueError("expected inputs of shape (..., 4, 3)")
    r = _single_densities(b)
    rho = np.einsum("...ab,...cd,...ef,...gh->...acegbdfh", r[..., 0, :, :], r[..., 1, :, :],
                    r[..., 2, :, :], r[..., 3, :, :])
    rho = rho.reshape(b.shape[:-2] + (16, 16))
    k = branch_kraus(layout, outcome)
    out = k @ rho @ k.conj().T
    theta = np.trace(out, axis1=-2, axis2=-1).real
    with np.errstate(invalid="ignore", divide="ignore"):
        x = 2 * out[..., 0, 1].real / theta
        y = 2 * out[..., 1, 0].imag / theta
        z = (out[..., 0, 0] - out[..., 1, 1]).real / theta
    vec = np.stack([x, y, z], axis=-1)
    vec[theta < 1e-14] = np.nan
    return theta, vec


def h4_closed_form(p):
    """Output H-polarization and success probability of the equal-input map."""
    p = np.asarray(p, dtype=float)
    p2 = p * p
    p4 = p2 * p2
    den = 2.0 + 2.0 * p2 + p4
    return (6.0 * p2 + p4) / (np.sqrt(2.0) * den), den / 16.0


def candidate_layouts():
    """Every three-check layout on four wires with bases in {X, Z}."""
    for first, second, third in itertools.product(
        itertools.permutations(range(N_WIRES), 2), repeat=3
    ):
        pairs = (first, second, third)
        for bases in itertools.product("XZ", repeat=3):
            try:
                yield H4Layout(tuple(ParityCheck(a, b, B) for (a, b), B in zip(pairs, bases)))
            except ValueError:
                continue


def layout_signature(layout: H4Layout) -> tuple[str, str]:
    """Shape and basis pattern, invariant under wire relabeling and global H.

    Layouts with equal signatures give identical equal-input maps.
    """
    c1, c2, c3 = layout.checks
    disjoint = not ({c1.survivor, c1.measured} & {c2.survivor, c2.measured})
    shape = "tree" if disjoint else "chain"
    bases = "".join(c.basis for c in layout.checks)
    if bases[-1] == "Z":
        bases = bases.translate(str.maketrans("XZ", "ZX"))
    return shape, bases


def calibrate_h4_layout(grid_points: int = 101, tol: float = 1e-10) -> list[H4Layout]:
    """Layouts whose equal-input branch 0 reproduces the closed form on a grid.

    The survivor's H-polarization and the branch-0 probability must both
    match to ``tol`` for every ``p`` in ``linspace(0, 1, grid_points)``.
    """
    grid = np.linspace(0.0, 1.0, grid_points)
    s = 1.0 / np.sqrt(2.0)
    inputs = np.zeros((grid_points, 4, 3))
    inputs[..., 0] = grid[:, None] * s
    inputs[..., 2] = grid[:, None] * s
    want_p, want_theta = h4_closed_form(grid)
    matches = []
    for layout in candidate_layouts():
        theta, vec = h4_branch_batch(inputs, layout)
        got_p = (vec[:, 0] + vec[:, 2]) * s
        if np.max(np.abs(theta - want_theta)) < tol and np.max(np.abs(got_p - want_p)) < tol:
            matches.append(layout)
    return matches

"""Stabilizer-code distillation by projection onto the trivial syndrome."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..bloch import (
    CANONICAL_H,
    CANONICAL_T,
    BlochVector,
    MagicAxis,
    polarization,
    state_on_axis,
    twirl_h,
    twirl_t,
)
from .states import (
    CLIFFORD_ROTATIONS,
    IMPOSSIBLE_PROB,
    MAX_QUBITS,
    ImpossibleOutcome,
    PauliString,
    gf2_rank,
    product_state,
)


@dataclass(frozen=True)
class CodeSpec:
    """A stabilizer code with one logical qubit.

    ``correction`` indexes :data:`CLIFFORD_ROTATIONS`; it is the
    single-qubit Clifford applied to the decoded logical Bloch vector.
    ``family`` is the magic axis the protocol distills toward.
    """

    name: str
    generators: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    family: str
    correction: int = 0

    def __post_init__(self):
        n = self.n
        ops = list(self.generators) + [self.logical_x, self.logical_z]
        if any(op.n != n for op in ops):
            raise ValueError("all operators must act on the same register")
        if n > MAX_QUBITS:
            raise ValueError(f"{n} qubits exceeds the simulator limit")
        for i, g in enumerate(self.generators):
            for h in self.generators[i + 1:]:
                if not g.commutes_with(h):
                    raise ValueError(f"generators {g} and {h} anticommute")
            if not (g.commutes_with(self.logical_x) and g.commutes_with(self.logical_z)):
                raise ValueError(f"logical operators do not commute with {g}")
        rank = gf2_rank(np.array([g.symplectic() for g in self.generators]))
        if rank != len(self.generators):
            raise ValueError("stabilizer generators are not independent")
        if self.logical_x.commutes_with(self.logical_z):
            raise ValueError("logical X and Z must anticommute")
        if self.family not in ("H", "T"):
            raise ValueError("family must be 'H' or 'T'")
        if not 0 <= self.correction < len(CLIFFORD_ROTATIONS):
            raise ValueError("correction index out of range")

    @property
    def n(self) -> int:
        return self.logical_x.n

    @property
    def axis(self) -> MagicAxis:
        return CANONICAL_T if self.family == "T" else CANONICAL_H


@lru_cache(maxsize=None)
def _code_operators(code: CodeSpec):
    dim = 2**code.n
    proj = np.eye(dim, dtype=complex)
    for g in code.generators:
        proj = proj @ (np.eye(dim) + g.matrix()) / 2.0
    lx = code.logical_x.matrix()
    lz = code.logical_z.matrix()
    ly = 1j * lx @ lz
    return proj, (lx, ly, lz)


def project_codespace(code: CodeSpec, inputs: Sequence[BlochVector]):
    """Raw logical Bloch vector and projection weight, before any correction."""
    inputs = list(inputs)
    if len(inputs) != code.n:
        raise ValueError(f"{code.name} needs {code.n} inputs, got {len(inputs)}")
    rho = product_state(inputs)
    proj, logicals = _code_operators(code)
    post = proj @ rho @ proj
    weight = float(np.trace(post).real)
    if weight < IMPOSSIBLE_PROB:
        raise ImpossibleOutcome(f"trivial syndrome of {code.name} has weight {weight:.3g}")
    post /= weight
    v = np.array([np.trace(post @ L).real for L in logicals])
    return v, weight


def code_distill(code: CodeSpec, inputs: Sequence[BlochVector], axis: MagicAxis | None = None):
    """One round of code-based distillation.

    Projects the product of ``inputs`` onto the trivial-syndrome codespace,
    decodes the logical Bloch vector, applies the code's correction Clifford
    and twirls onto ``axis`` (the code's own family by default).

    Returns
    -------
    (BlochVector, float)
        Output state and success probability.
    """
    axis = code.axis if axis is None else axis
    v, weight = project_codespace(code, inputs)
    v = CLIFFORD_ROTATIONS[code.correction] @ v
    norm = np.linalg.norm(v)
    if norm > 1.0:
        v = v / norm
    out = BlochVector.from_array(v)
    if axis.tag == "T":
        out = twirl_t(out)
    elif axis.tag == "H":
        out = twirl_h(out)
    else:
        raise ValueError("code_distill twirls onto canonical H or T axes only")
    return out, weight


def calibrate_correction(code: CodeSpec, p_ref: float = 0.9) -> int:
    """Index of the Clifford maximizing output polarization at ``p_ref``.

    Ties go to the earliest index, so the identity wins whenever it is
    optimal.
    """
    axis = code.axis
    inputs = [state_on_axis(axis, p_ref)] * code.n
    raw, _ = project_codespace(code, inputs)
    scores = [float(np.dot(R @ raw, axis.as_array())) for R in CLIFFORD_ROTATIONS]
    best = max(scores)
    return next(i for i, s in enumerate(scores) if s >= best - 1e-12)


def _paulis(*texts: str) -> tuple[PauliString, ...]:
    return tuple(PauliString(t) for t in texts)


# Cyclic [[5,1,3]] generators; the decoded state lands on the antipodal T axis,
# so the frozen correction is an odd permutation with all signs flipped.
FIVE_QUBIT_CODE = CodeSpec(
    name="five_qubit",
    generators=_paulis("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"),
    logical_x=PauliString("XXXXX"),
    logical_z=PauliString("ZZZZZ"),
    family="T",
    correction=7,
)

STEANE_CODE = CodeSpec(
    name="steane",
    generators=_paulis(
        "IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"
    ),
    logical_x=PauliString("XXXXXXX"),
    logical_z=PauliString("ZZZZZZZ"),
    family="H",
    correction=0,
)

CODES = {"five_qubit": FIVE_QUBIT_CODE, "steane": STEANE_CODE}


def equal_input_distill(code: CodeSpec, p: float):
    """Output polarization and success probability for ``n`` equal copies."""
    out, weight = code_distill(code, [state_on_axis(code.axis, p)] * code.n)
    return polarization(out, code.axis), weight

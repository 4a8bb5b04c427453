"""Dense density matrices, Pauli strings and projective measurement.

Qubit 0 is the leftmost tensor factor (most significant bit of a basis
index).  Registers are capped at ``MAX_QUBITS`` so the largest operator is
256 x 256.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from ..bloch import BLOCH_TOL, BlochVector

MAX_QUBITS = 8
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGEN_FLOOR = -1e-9
IMPOSSIBLE_PROB = 1e-14

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


class ImpossibleOutcome(ValueError):
    """Raised when a post-selected branch has (numerically) zero probability."""


@dataclass(frozen=True)
class PauliString:
    """Signed tensor product of Pauli letters, e.g. ``PauliString("XZZXI")``."""

    letters: str
    sign: int = 1

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or set(letters) - set("IXYZ"):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        text = text.strip()
        sign = -1 if text.startswith("-") else 1
        return cls(text.lstrip("+-"), sign)

    @classmethod
    def single(cls, letter: str, qubit: int, n: int) -> "PauliString":
        letters = ["I"] * n
        letters[qubit] = letter
        return cls("".join(letters))

    @property
    def n(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        return self.sign * reduce(np.kron, [PAULI[c] for c in self.letters])

    def symplectic(self) -> np.ndarray:
        """Binary (x | z) vector of length 2n, sign dropped."""
        xs = [c in "XY" for c in self.letters]
        zs = [c in "ZY" for c in self.letters]
        return np.array(xs + zs, dtype=np.uint8)

    def commutes_with(self, other: "PauliString") -> bool:
        if other.n != self.n:
            raise ValueError("Pauli strings act on registers of different size")
        anti = sum(
            1
            for a, b in zip(self.letters, other.letters)
            if a != "I" and b != "I" and a != b
        )
        return anti % 2 == 0

    def __str__(self):
        return ("-" if self.sign < 0 else "+") + self.letters


def gf2_rank(rows: np.ndarray) -> int:
    m = np.array(rows, dtype=np.uint8) % 2
    rank = 0
    n_rows, n_cols = m.shape
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if m[r, col]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(n_rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
    return rank


def n_qubits(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    n = int(round(np.log2(dim)))
    if rho.shape != (dim, dim) or 2**n != dim:
        raise ValueError(f"not a qubit-register operator: shape {rho.shape}")
    return n


def check_density(rho: np.ndarray) -> None:
    """Raise ``ValueError`` unless ``rho`` is a valid density matrix."""
    n_qubits(rho)
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
        raise ValueError(f"trace {np.trace(rho).real!r} != 1")
    if np.linalg.eigvalsh(rho).min() < EIGEN_FLOOR:
        raise ValueError("density matrix has a negative eigenvalue")


def density_from_bloch(s: BlochVector) -> np.ndarray:
    if s.norm() > 1.0 + BLOCH_TOL:
        raise ValueError("Bloch vector is not physical")
    return (I2 + s.x * X + s.y * Y + s.z * Z) / 2.0


def bloch_from_density(rho: np.ndarray) -> BlochVector:
    if n_qubits(rho) != 1:
        raise ValueError("bloch_from_density needs a single-qubit matrix")
    v = [np.trace(rho @ P).real for P in (X, Y, Z)]
    # clip rounding overshoot on pure states
    norm = np.linalg.norm(v)
    if 1.0 < norm <= 1.0 + BLOCH_TOL:
        v = list(np.asarray(v) / norm)
    return BlochVector(*v)


def product_state(states) -> np.ndarray:
    states = list(states)
    if not 1 <= len(states) <= MAX_QUBITS:
        raise ValueError(f"product_state supports 1..{MAX_QUBITS} qubits, got {len(states)}")
    return reduce(np.kron, [density_from_bloch(s) for s in states])


def embed(gate: np.ndarray, targets, n: int) -> np.ndarray:
    """Lift a ``k``-qubit gate acting on ``targets`` to an ``n``-qubit unitary."""
    targets = list(targets)
    k = len(targets)
    if gate.shape != (2**k, 2**k):
        raise ValueError("gate size does not match target count")
    if len(set(targets)) != k or not all(0 <= t < n for t in targets):
        raise ValueError(f"bad targets {targets} for {n} qubits")
    rest = [q for q in range(n) if q not in targets]
    order = targets + rest
    full = np.kron(gate, np.eye(2 ** (n - k), dtype=complex))
    # full acts on qubits in `order`; permute back to natural order
    t = full.reshape([2] * (2 * n))
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    return t.reshape(2**n, 2**n)


CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def cnot(control: int, target: int, n: int) -> np.ndarray:
    return embed(CNOT, [control, target], n)


def apply_unitary(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    return u @ rho @ u.conj().T


def measure_projective(rho: np.ndarray, observable: PauliString, keep: int = 1):
    """Project onto the ``keep`` (+1 or -1) eigenspace of ``observable``.

    Returns the renormalized post-measurement state and its Born probability.
    """
    if keep not in (1, -1):
        raise ValueError("keep must be +1 or -1")
    n = n_qubits(rho)
    if observable.n != n:
        raise ValueError("observable length does not match the register")
    proj = (np.eye(2**n) + keep * observable.matrix()) / 2.0
    post = proj @ rho @ proj
    prob = float(np.trace(post).real)
    if prob < IMPOSSIBLE_PROB:
        raise ImpossibleOutcome(f"outcome {keep:+d} of {observable} has probability {prob:.3g}")
    return post / prob, min(prob, 1.0)


def partial_trace_keep(rho: np.ndarray, keep) -> np.ndarray:
    """Reduced state on the qubits listed in ``keep`` (kept in that order)."""
    n = n_qubits(rho)
    keep = list(keep)
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    perm = keep + drop
    t = t.transpose(perm + [n + q for q in perm])
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def clifford_rotations() -> tuple[np.ndarray, ...]:
    """Bloch-sphere action of the 24 single-qubit Cliffords (modulo phase).

    Each is a signed permutation matrix with determinant +1.  The identity
    comes first; the order is fixed so that ties in a search break
    reproducibly.
    """
    out = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            r = np.zeros((3, 3))
            for row, (col, s) in enumerate(zip(perm, signs)):
                r[row, col] = s
            if round(np.linalg.det(r)) == 1:
                out.append(r)
    return tuple(out)


CLIFFORD_ROTATIONS = clifford_rotations()

"""
Bloch-vector algebra for single-qubit magic states.

Every distillation map in this package acts on a scalar polarization along
an H-type or T-type magic axis.  This module holds the conversions between
Bloch vectors and those polarizations, the stabilizer-octahedron test, and
the two twirling projections that move a state onto a magic axis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Literal

import numpy as np

BLOCH_TOL = 1e-9
AXIS_NORM_TOL = 1e-12

#: Polarization threshold of the five-qubit T-type protocol, sqrt(3/7).
T5_THRESHOLD = float(np.sqrt(3.0 / 7.0))
#: Polarization threshold of the H-type protocols, 1/sqrt(2).
H_THRESHOLD = float(1.0 / np.sqrt(2.0))
#: p_T of a state on the canonical H axis is this factor times its p_H.
H_TO_T_FACTOR = float(np.sqrt(2.0 / 3.0))

Family = Literal["H", "T"]


@dataclass(frozen=True)
class BlochVector:
    """A single-qubit state ``(1 + x X + y Y + z Z) / 2``."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.norm() > 1.0 + BLOCH_TOL:
            raise ValueError(
                f"Bloch vector {self.as_tuple()} has length {self.norm():.12g} > 1"
            )

    @classmethod
    def from_array(cls, v) -> "BlochVector":
        x, y, z = np.asarray(v, dtype=float).reshape(3)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def isclose(self, other: "BlochVector", atol: float = BLOCH_TOL) -> bool:
        return bool(np.allclose(self.as_array(), other.as_array(), rtol=0.0, atol=atol))


@dataclass(frozen=True)
class MagicAxis:
    """Unit direction of a magic state in the Bloch ball.

    ``tag`` is ``"H"`` or ``"T"`` for the canonical axes and ``"general"``
    for any other direction, including the reflected members of the H and T
    families.
    """

    direction: tuple[float, float, float]
    tag: str = "general"

    def __post_init__(self):
        d = tuple(float(c) for c in self.direction)
        if len(d) != 3:
            raise ValueError("axis direction must have three components")
        if abs(np.linalg.norm(d) - 1.0) > AXIS_NORM_TOL:
            raise ValueError(f"axis direction {d} is not unit norm")
        object.__setattr__(self, "direction", d)

    def as_array(self) -> np.ndarray:
        return np.array(self.direction)


_S2 = 1.0 / np.sqrt(2.0)
_S3 = 1.0 / np.sqrt(3.0)

CANONICAL_H = MagicAxis((_S2, 0.0, _S2), "H")
CANONICAL_T = MagicAxis((_S3, _S3, _S3), "T")


def _h_axes() -> tuple[MagicAxis, ...]:
    axes = []
    for zero in (0, 1, 2):
        for sa, sb in itertools.product((1.0, -1.0), repeat=2):
            d = [sa * _S2, sb * _S2]
            d.insert(zero, 0.0)
            axes.append(MagicAxis(tuple(d)))
    return tuple(axes)


H_AXES = _h_axes()
T_AXES = tuple(
    MagicAxis(tuple(s * _S3 for s in signs))
    for signs in itertools.product((1.0, -1.0), repeat=3)
)


def canonical_axis(family: Family) -> MagicAxis:
    if family == "H":
        return CANONICAL_H
    if family == "T":
        return CANONICAL_T
    raise ValueError(f"unknown magic family {family!r}")


def polarization(s: BlochVector, axis: MagicAxis) -> float:
    """Polarization ``2 Tr(rho rho_axis) - 1`` of ``s`` along ``axis``.

    For the canonical axes this is ``(x + z)/sqrt(2)`` and
    ``(x + y + z)/sqrt(3)``.
    """
    if abs(np.linalg.norm(axis.direction) - 1.0) > AXIS_NORM_TOL:
        raise ValueError("axis must be unit norm")
    return float(np.dot(s.as_array(), axis.as_array()))


def p_h(s: BlochVector) -> float:
    return polarization(s, CANONICAL_H)


def p_t(s: BlochVector) -> float:
    return polarization(s, CANONICAL_T)


def in_stabilizer_octahedron(s: BlochVector) -> bool:
    return abs(s.x) + abs(s.y) + abs(s.z) <= 1.0 + 1e-12


def symmetrized_polarization(s: BlochVector, family: Family) -> float:
    """Largest polarization of ``s`` over every axis of a magic family.

    Used for region queries outside the canonical octant.
    """
    axes = H_AXES if family == "H" else T_AXES if family == "T" else None
    if axes is None:
        raise ValueError(f"unknown magic family {family!r}")
    return max(polarization(s, a) for a in axes)


def twirl_t(s: BlochVector) -> BlochVector:
    """T-twirl ``(rho + T rho T^dag + T^dag rho T)/3``.

    ``T`` cyclically permutes X -> Y -> Z, so the average keeps only the
    component along (1, 1, 1).
    """
    m = (s.x + s.y + s.z) / 3.0
    return BlochVector(m, m, m)


def twirl_h(s: BlochVector) -> BlochVector:
    """H-twirl ``(rho + H rho H^dag)/2``; Hadamard swaps x and z and flips y."""
    m = (s.x + s.z) / 2.0
    return BlochVector(m, 0.0, m)


def state_on_axis(axis: MagicAxis, p: float) -> BlochVector:
    if abs(p) > 1.0:
        raise ValueError(f"|p| = {abs(p)} exceeds 1")
    return BlochVector.from_array(p * axis.as_array())


def in_region_t(s: BlochVector, symmetrized: bool = False) -> bool:
    """Membership in the five-qubit distillable region (p_T > sqrt(3/7))."""
    p = symmetrized_polarization(s, "T") if symmetrized else p_t(s)
    return p > T5_THRESHOLD


def in_region_h(s: BlochVector, symmetrized: bool = False) -> bool:
    """Membership in the seven-qubit distillable region (p_H > 1/sqrt(2))."""
    p = symmetrized_polarization(s, "H") if symmetrized else p_h(s)
    return p > H_THRESHOLD

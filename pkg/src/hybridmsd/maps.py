"""
One-step polarization maps for the three distillation protocols.

The four-copy H-type map is closed form.  The five-qubit T-type and
seven-qubit H-type maps come from the density-matrix simulator: they are
tabulated once on a uniform grid, cached on disk as plain text, and
evaluated with monotone cubic (PCHIP) interpolation between nodes.
"""
from __future__ import annotations

import enum
import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import bisect

from .bloch import H_THRESHOLD, T5_THRESHOLD
from .sim.circuit import h4_closed_form
from .sim.codes import FIVE_QUBIT_CODE, STEANE_CODE, CodeSpec, equal_input_distill

CACHE_ENV = "HYBRIDMSD_CACHE_DIR"
TABLE_FORMAT_VERSION = 1
DEFAULT_NODES = 1001
ROOT_XTOL = 1e-12


class Protocol(str, enum.Enum):
    H4 = "H4"
    T5 = "T5"
    H7 = "H7"

    @property
    def n(self) -> int:
        return {"H4": 4, "T5": 5, "H7": 7}[self.value]

    @property
    def family(self) -> str:
        return "T" if self is Protocol.T5 else "H"

    @property
    def code(self) -> CodeSpec | None:
        return {"T5": FIVE_QUBIT_CODE, "H7": STEANE_CODE}.get(self.value)

    @property
    def threshold(self) -> float:
        return T5_THRESHOLD if self is Protocol.T5 else H_THRESHOLD

    @classmethod
    def parse(cls, name) -> "Protocol":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            raise ValueError(f"unknown protocol {name!r}; expected one of H4, T5, H7") from None


@dataclass(frozen=True)
class StepResult:
    protocol: Protocol
    p_in: float
    p_out: float
    theta: float

    @property
    def n(self) -> int:
        return self.protocol.n

    @property
    def gain(self) -> float:
        return self.p_out - self.p_in


def _check_p(p: float) -> None:
    if not -1.0 <= p <= 1.0:
        raise ValueError(f"polarization {p} outside [-1, 1]")


def h4_map(p0: float) -> StepResult:
    _check_p(p0)
    p_out, theta = h4_closed_form(p0)
    return StepResult(Protocol.H4, float(p0), float(p_out), float(theta))


def h4_fixed_points() -> tuple[float, float]:
    """Lower (unstable) and upper (attracting) nontrivial fixed points of the H4 map."""
    g = lambda p: float(h4_closed_form(p)[0]) - p
    lower = bisect(g, 0.5, 0.85, xtol=ROOT_XTOL)
    upper = bisect(g, 0.85, 1.0, xtol=ROOT_XTOL)
    return lower, upper


def h4_error_map(eps):
    """H4 map written for the error probability ``eps = (1 - p_H)/2``."""
    eps = np.asarray(eps, dtype=float)
    if np.any((eps < 0.0) | (eps > 1.0)):
        raise ValueError("error probability must lie in [0, 1]")
    q = 1.0 - 2.0 * eps
    out = 0.5 - (6 * q**2 + q**4) / (np.sqrt(8.0) * (2 + 2 * q**2 + q**4))
    return out if out.ndim else float(out)


# -- tabulated code maps -----------------------------------------------------


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "hybridmsd"


@dataclass
class MapTable:
    """Simulator samples ``p_in -> (p_out, theta)`` with PCHIP interpolation."""

    protocol: Protocol
    p_in: np.ndarray
    p_out: np.ndarray
    theta: np.ndarray
    interpolation: str = "pchip"

    def __post_init__(self):
        self.protocol = Protocol.parse(self.protocol)
        self.p_in = np.asarray(self.p_in, dtype=float)
        self.p_out = np.asarray(self.p_out, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        if not (self.p_in.shape == self.p_out.shape == self.theta.shape):
            raise ValueError("table columns differ in length")
        if np.any(np.diff(self.p_in) <= 0):
            raise ValueError("table grid must be strictly increasing")
        if self.interpolation != "pchip":
            raise ValueError(f"unsupported interpolation {self.interpolation!r}")
        self._out = PchipInterpolator(self.p_in, self.p_out, extrapolate=False)
        self._theta = PchipInterpolator(self.p_in, self.theta, extrapolate=False)

    @classmethod
    def from_simulation(cls, protocol, nodes: int = DEFAULT_NODES) -> "MapTable":
        protocol = Protocol.parse(protocol)
        if protocol.code is None:
            raise ValueError("H4 is closed form and has no table")
        grid = np.linspace(0.0, 1.0, nodes)
        rows = [equal_input_distill(protocol.code, p) for p in grid]
        out, theta = np.array(rows).T
        return cls(protocol, grid, out, theta)

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < self.p_in[0]) | (p > self.p_in[-1])):
            raise ValueError("polarization outside the tabulated range")
        out, theta = self._out(p), self._theta(p)
        if out.ndim == 0:
            return float(out), float(theta)
        return out, theta

    @property
    def nodes(self) -> int:
        return len(self.p_in)

    def offgrid_error(self, samples: int = 100, seed: int = 0) -> float:
        """Largest deviation from fresh simulation at random cell midpoints."""
        rng = np.random.default_rng(seed)
        cells = rng.choice(self.nodes - 1, size=min(samples, self.nodes - 1), replace=False)
        mids = 0.5 * (self.p_in[cells] + self.p_in[cells + 1])
        worst = 0.0
        for p in mids:
            want_out, want_theta = equal_input_distill(self.protocol.code, p)
            got_out, got_theta = self(p)
            worst = max(worst, abs(got_out - want_out), abs(got_theta - want_theta))
        return worst

    # The on-disk format is text: three comment lines then one
    # "p_in p_out theta" row per node, each value printed with 17
    # significant digits so a load round-trips exactly.
    def save(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = (
            f"hybridmsd-maptable v{TABLE_FORMAT_VERSION}\n"
            f"protocol={self.protocol.value} nodes={self.nodes} interpolation={self.interpolation}\n"
            "p_in p_out theta"
        )
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                np.savetxt(fh, np.column_stack([self.p_in, self.p_out, self.theta]),
                           fmt="%.17g", header=header)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path) -> "MapTable":
        path = Path(path)
        with open(path) as fh:
            first = fh.readline()
            second = fh.readline()
        if first.strip() != f"# hybridmsd-maptable v{TABLE_FORMAT_VERSION}":
            raise ValueError(f"{path}: unrecognized map table header")
        meta = dict(item.split("=", 1) for item in second.lstrip("# ").split())
        data = np.loadtxt(path, ndmin=2)
        if data.shape[0] != int(meta["nodes"]):
            raise ValueError(f"{path}: node count does not match header")
        return cls(meta["protocol"], data[:, 0], data[:, 1], data[:, 2], meta["interpolation"])


def table_path(protocol, nodes: int = DEFAULT_NODES, directory=None) -> Path:
    protocol = Protocol.parse(protocol)
    directory = cache_dir() if directory is None else Path(directory)
    return directory / f"{protocol.code.name}_{nodes}.txt"


def _load_or_build(protocol: Protocol, nodes: int, use_cache: bool) -> MapTable:
    if not use_cache:
        return MapTable.from_simulation(protocol, nodes)
    path = table_path(protocol, nodes)
    if path.exists():
        try:
            table = MapTable.load(path)
            if table.protocol is protocol:
                return table
        except (OSError, ValueError, KeyError):
            pass
    table = MapTable.from_simulation(protocol, nodes)
    try:
        table.save(path)
    except OSError:
        pass  # read-only cache location: keep the in-memory table
    return table


@lru_cache(maxsize=None)
def get_table(protocol, nodes: int = DEFAULT_NODES, use_cache: bool = True) -> MapTable:
    """Tabulated map for T5 or H7, memoized in-process and on disk."""
    return _load_or_build(Protocol.parse(protocol), nodes, use_cache)


def _code_step(protocol: Protocol, p: float, exact: bool) -> StepResult:
    _check_p(p)
    if exact or p < 0.0:
        p_out, theta = equal_input_distill(protocol.code, p)
    else:
        p_out, theta = get_table(protocol)(p)
    return StepResult(protocol, float(p), float(p_out), float(theta))


def t5_map(p: float, exact: bool = False) -> StepResult:
    """Five-qubit T-type map; ``exact`` bypasses the table and simulates."""
    return _code_step(Protocol.T5, p, exact)


def h7_map(p: float, exact: bool = False) -> StepResult:
    """Seven-qubit (Steane) H-type map; ``exact`` bypasses the table."""
    return _code_step(Protocol.H7, p, exact)


def step(protocol, p: float, exact: bool = False) -> StepResult:
    protocol = Protocol.parse(protocol)
    if protocol is Protocol.H4:
        return h4_map(p)
    return _code_step(protocol, p, exact)


def map_arrays(protocol, p):
    """Vectorized ``(p_out, theta)`` for ``p`` in [0, 1]."""
    protocol = Protocol.parse(protocol)
    if protocol is Protocol.H4:
        return h4_closed_form(p)
    return get_table(protocol)(p)


def unstable_fixed_point(protocol) -> float:
    """Distillation threshold: the fixed point separating decay from growth."""
    protocol = Protocol.parse(protocol)
    if protocol is Protocol.H4:
        return h4_fixed_points()[0]
    g = lambda p: map_arrays(protocol, p)[0] - p
    return bisect(g, 0.5, 0.99, xtol=1e-10)


@dataclass(frozen=True)
class ConvergenceReport:
    protocol: Protocol
    fixed_point: float
    order: float
    factor: float


def convergence_order(protocol, deltas=None) -> ConvergenceReport:
    """Local order of convergence of the error ``eps = (1 - p)/2``.

    Fits ``log|eps_out - eps*|`` against ``log|eps - eps*|`` near the
    attracting fixed point ``eps*``.  ``factor`` is ``exp(intercept)``, the
    linear contraction factor when the order is 1.  Code maps are
    simulated directly rather than interpolated.
    """
    protocol = Protocol.parse(protocol)
    if deltas is None:
        deltas = np.geomspace(1e-5, 1e-3, 9) if protocol is Protocol.H4 else np.geomspace(1e-4, 1e-2, 9)
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size < 3 or np.any(deltas <= 0):
        raise ValueError("need at least three positive offsets from the fixed point")

    if protocol is Protocol.H4:
        eps_star = (1.0 - h4_fixed_points()[1]) / 2.0
        out = h4_error_map(eps_star + deltas) - eps_star
    else:
        eps_star = 0.0
        out = np.array([
            (1.0 - equal_input_distill(protocol.code, 1.0 - 2.0 * d)[0]) / 2.0 for d in deltas
        ])
    if np.any(~np.isfinite(out)) or np.any(out <= 0):
        raise ValueError(
            "map output indistinguishable from the fixed point at these offsets; "
            "use larger offsets"
        )
    slope, intercept = np.polyfit(np.log(deltas), np.log(out), 1)
    return ConvergenceReport(protocol, 1.0 - 2.0 * eps_star, float(slope), float(np.exp(intercept)))

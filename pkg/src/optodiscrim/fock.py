"""Diagonal passive devices and truncated multimode Fock states.

A passive linear device written in its eigenbasis applies a phase
``exp(i * sum_j phases[j] * n_j)`` to the Fock vector ``|n_1, ..., n_M>``.
Everything else in the package (analytic beamsplitter optimum, iterative
optimizer, oracles) is built on the handful of expectations defined here.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

NORM_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
CLAMP_TOL = 1e-12

FockIndex = tuple[int, ...]


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class DimensionError(ValueError):
    """State and device disagree on the number of modes."""


class DevicesIdenticalError(DomainError):
    """The device acts as the identity, so the two hypotheses coincide."""


class InfeasibleStateError(ValueError):
    """The requested state cannot satisfy its defining constraint."""


class InternalInvariantError(RuntimeError):
    pass


def wrap_phase(x: float) -> float:
    """Map an angle to the canonical interval (-pi, pi]."""
    if not math.isfinite(x):
        raise DomainError(f"phase must be finite, got {x!r}")
    y = math.remainder(x, 2 * math.pi)
    if y <= -math.pi:
        y += 2 * math.pi
    return y


@dataclass(frozen=True)
class DeviceSpec:
    """Diagonal passive device given by one phase per mode (radians)."""

    phases: tuple[float, ...]

    def __post_init__(self):
        phases = tuple(wrap_phase(float(d)) for d in self.phases)
        if len(phases) < 1:
            raise DomainError("a device needs at least one mode")
        object.__setattr__(self, "phases", phases)

    @classmethod
    def beamsplitter(cls, delta: float) -> "DeviceSpec":
        return cls((delta, -delta))

    @property
    def mode_count(self) -> int:
        return len(self.phases)

    @property
    def best_mode(self) -> int:
        """Index of the mode with the largest phase magnitude (lowest index on ties)."""
        mags = [abs(d) for d in self.phases]
        return mags.index(max(mags))

    @property
    def delta_star(self) -> float:
        return abs(self.phases[self.best_mode])

    def phase_vector(self, indices: Sequence[FockIndex]) -> np.ndarray:
        """Total phase ``sum_j delta_j n_j`` for each index, as a float array."""
        if len(indices) == 0:
            return np.zeros(0)
        occ = np.asarray(indices, dtype=float).reshape(len(indices), -1)
        if occ.shape[1] != self.mode_count:
            raise DimensionError(
                f"state has {occ.shape[1]} modes, device has {self.mode_count}"
            )
        return occ @ np.asarray(self.phases)


def fock_basis(mode_count: int, cutoff: int) -> list[FockIndex]:
    """All occupation tuples with total photon number <= cutoff.

    Ordered by total photon number, then lexicographically descending, so the
    vacuum comes first and ``(n, 0, ..., 0)`` precedes ``(0, ..., 0, n)``.
    """
    if mode_count < 1 or cutoff < 0:
        raise DomainError("mode_count must be >= 1 and cutoff >= 0")
    out: list[FockIndex] = []
    for total in range(cutoff + 1):
        shell = [
            c
            for c in itertools.product(range(total + 1), repeat=mode_count)
            if sum(c) == total
        ]
        out.extend(sorted(shell, reverse=True))
    return out


@dataclass(frozen=True, eq=False)
class TruncatedState:
    """Unit vector over a sparse set of Fock indices with total <= cutoff.

    Construct with :meth:`from_amplitudes` or :meth:`from_vector`; both
    renormalize small drift (within 1e-9) and reject anything larger.
    """

    cutoff: int
    indices: tuple[FockIndex, ...]
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        indices = tuple(tuple(int(n) for n in k) for k in self.indices)
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if len(indices) != amps.size:
            raise DomainError("indices and amplitudes differ in length")
        if not indices:
            raise DomainError("a state needs at least one basis vector")
        if len(set(indices)) != len(indices):
            raise DomainError("duplicate Fock index")
        m = len(indices[0])
        if m < 1:
            raise DomainError("a Fock index needs at least one mode")
        for k in indices:
            if len(k) != m:
                raise DimensionError("all Fock indices must have the same mode count")
            if min(k) < 0:
                raise DomainError(f"negative occupation in {k}")
            if sum(k) > self.cutoff:
                raise DomainError(f"index {k} exceeds cutoff {self.cutoff}")
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > RENORMALIZE_TOL:
            raise DomainError(f"state is not normalized (norm^2 = {norm2!r})")
        amps = amps / math.sqrt(norm2)
        amps.setflags(write=False)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(
        cls, amplitudes: Mapping[Iterable[int], complex], cutoff: int | None = None
    ) -> "TruncatedState":
        items = [(tuple(k), complex(a)) for k, a in amplitudes.items()]
        if cutoff is None:
            cutoff = max((sum(k) for k, _ in items), default=0)
        return cls(cutoff, tuple(k for k, _ in items), np.array([a for _, a in items]))

    @classmethod
    def from_vector(
        cls, indices: Sequence[FockIndex], vector: np.ndarray, cutoff: int
    ) -> "TruncatedState":
        return cls(cutoff, tuple(indices), np.asarray(vector, dtype=complex))

    @classmethod
    def vacuum(cls, mode_count: int, cutoff: int = 0) -> "TruncatedState":
        return cls(cutoff, ((0,) * mode_count,), np.array([1.0 + 0j]))

    @property
    def mode_count(self) -> int:
        return len(self.indices[0])

    @property
    def amplitudes(self) -> dict[FockIndex, complex]:
        return {k: complex(a) for k, a in zip(self.indices, self.amps)}

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    @property
    def totals(self) -> np.ndarray:
        return np.array([sum(k) for k in self.indices], dtype=float)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def to_dense(self, basis: Sequence[FockIndex]) -> np.ndarray:
        """Amplitudes laid out on ``basis``; raises if a stored index is missing."""
        pos = {k: i for i, k in enumerate(basis)}
        out = np.zeros(len(basis), dtype=complex)
        for k, a in zip(self.indices, self.amps):
            if k not in pos:
                raise DomainError(f"index {k} not in target basis")
            out[pos[k]] = a
        return out


def _check_modes(state: TruncatedState, device: DeviceSpec) -> None:
    if state.mode_count != device.mode_count:
        raise DimensionError(
            f"state has {state.mode_count} modes, device has {device.mode_count}"
        )


def expect_unitary(state: TruncatedState, device: DeviceSpec) -> complex:
    """<psi|U|psi> for the diagonal device U."""
    _check_modes(state, device)
    phases = device.phase_vector(state.indices)
    return complex(np.sum(state.weights * np.exp(1j * phases)))


def mean_photons(state: TruncatedState) -> float:
    return float(np.dot(state.weights, state.totals))


def error_probability(overlap_modulus: float) -> float:
    """Minimum error for two equiprobable pure states with the given |overlap|."""
    x = float(overlap_modulus)
    if not (-CLAMP_TOL <= x <= 1.0 + CLAMP_TOL):
        raise DomainError(f"overlap modulus {x!r} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    # 1 - sqrt(1 - x^2) written without cancellation for small x
    return 0.5 * x * x / (1.0 + math.sqrt((1.0 - x) * (1.0 + x)))


def overlap_for_error(q: float) -> float:
    """Overlap level K = sqrt(4 q (1 - q)) that yields error probability q."""
    q = float(q)
    if not (0.0 <= q <= 0.5):
        raise DomainError(f"error probability {q!r} outside [0, 1/2]")
    return math.sqrt(4.0 * q * (1.0 - q))


def evolve(state: TruncatedState, device: DeviceSpec) -> TruncatedState:
    _check_modes(state, device)
    phases = device.phase_vector(state.indices)
    return TruncatedState(state.cutoff, state.indices, state.amps * np.exp(1j * phases))


class Strategy(str, enum.Enum):
    ANALYTIC_BEAMSPLITTER = "analytic-beamsplitter"
    ITERATIVE = "iterative"
    COHERENT_HOMODYNE = "coherent-homodyne"
    ORACLE = "oracle"


@dataclass(frozen=True)
class TradeoffPoint:
    """One (error, energy) pair together with the input that achieves it.

    ``energy`` is derived as ``1/2 + mean_photons`` and is not an init argument.
    """

    p_error: float
    mean_photons: float
    strategy: Strategy
    state_descriptor: Any = field(default=None, compare=False)
    energy: float = field(init=False)

    def __post_init__(self):
        if not (0.0 <= self.p_error <= 0.5 + CLAMP_TOL):
            raise DomainError(f"p_error {self.p_error!r} outside [0, 1/2]")
        if self.mean_photons < -CLAMP_TOL:
            raise DomainError(f"negative mean photon number {self.mean_photons!r}")
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "energy", 0.5 + self.mean_photons)


def point_from_state(
    state: TruncatedState, device: DeviceSpec, strategy: Strategy = Strategy.ITERATIVE
) -> TradeoffPoint:
    """Evaluate error probability and photon number of ``state`` on ``device``."""
    overlap = abs(expect_unitary(state, device))
    return TradeoffPoint(error_probability(overlap), mean_photons(state), strategy, state)

"""Exact minimum-energy discrimination of the identity from a beamsplitter.

The beamsplitter acts as ``diag(e^{i delta}, e^{-i delta})`` per photon in its
eigenbasis. The optimal input is a superposition of the two-mode vacuum and a
single NOON state ``(|n,0> + |0,n>)/sqrt(2)``; the branch ``n`` depends on
``delta`` only, through the smallest positive root of ``x = tan(x/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .fock import (
    DevicesIdenticalError,
    DeviceSpec,
    DomainError,
    InfeasibleStateError,
    InternalInvariantError,
    Strategy,
    TradeoffPoint,
    TruncatedState,
    error_probability,
    overlap_for_error,
    wrap_phase,
)

ROOT_LO = math.pi / 2 + 1e-9
ROOT_HI = math.pi - 1e-9
ROOT_TOL = 1e-12
# relative slack under which two candidate energies count as a tie
TIE_RTOL = 1e-12


def canonical_delta(delta: float) -> float:
    """|delta| after wrapping into (-pi, pi]; U and U^dagger are equally hard to tell apart."""
    return abs(wrap_phase(float(delta)))


@dataclass(frozen=True)
class NoonPairState:
    """``a1 |phi_n1> + a2 |phi_n2>`` with real non-negative amplitudes.

    ``|phi_0>`` is the two-mode vacuum, ``|phi_n>`` the NOON state with n photons.
    """

    n1: int
    n2: int
    a1: float
    a2: float
    delta: float

    def __post_init__(self):
        if self.n1 == self.n2:
            raise DomainError("NOON pair needs two distinct photon numbers")
        if min(self.n1, self.n2) < 0:
            raise DomainError("photon numbers must be non-negative")
        if self.a1 < 0 or self.a2 < 0:
            raise DomainError("amplitudes must be non-negative")
        if abs(self.a1**2 + self.a2**2 - 1.0) > 1e-12:
            raise DomainError("amplitudes must satisfy a1^2 + a2^2 = 1")

    @property
    def device(self) -> DeviceSpec:
        return DeviceSpec.beamsplitter(self.delta)

    def overlap(self) -> float:
        """Closed form of <psi|U|psi> (real for NOON superpositions)."""
        d = self.delta
        return self.a1**2 * math.cos(d * self.n1) + self.a2**2 * math.cos(d * self.n2)

    def mean_photons(self) -> float:
        return self.a1**2 * self.n1 + self.a2**2 * self.n2

    def to_state(self) -> TruncatedState:
        amps: dict[tuple[int, int], complex] = {}
        for n, a in ((self.n1, self.a1), (self.n2, self.a2)):
            if n == 0:
                amps[(0, 0)] = a
            else:
                amps[(n, 0)] = a / math.sqrt(2)
                amps[(0, n)] = a / math.sqrt(2)
        return TruncatedState.from_amplitudes(amps, cutoff=max(self.n1, self.n2))


@dataclass(frozen=True)
class BeamsplitterOptimum:
    n_star: int
    n_tilde: float
    state: NoonPairState
    point: TradeoffPoint


@lru_cache(maxsize=1)
def tan_half_root() -> float:
    """Smallest positive root x* of ``x = tan(x/2)``, found by bisection on (pi/2, pi)."""
    g = lambda x: x - math.tan(x / 2)
    lo, hi = ROOT_LO, ROOT_HI
    glo = g(lo)
    if glo * g(hi) >= 0:
        raise InternalInvariantError("root of x = tan(x/2) not bracketed")
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_n_tilde(delta: float) -> float:
    """Continuous minimizer of the single-NOON energy, ``x*/delta``."""
    d = float(delta)
    if not (0.0 < d <= math.pi):
        raise DomainError(f"delta must lie in (0, pi], got {delta!r}")
    return tan_half_root() / d


def energy_single_noon(n: int, delta: float, K: float) -> float:
    """Mean photon number of ``a0|00> + an|phi_n>`` meeting ``<U> = K``."""
    denom = 1.0 - math.cos(delta * n)
    if denom <= 1e-12:
        raise InfeasibleStateError(
            f"NOON branch n={n} acquires no relative phase at delta={delta!r}"
        )
    return (1.0 - K) * n / denom


def _feasible(n: int, delta: float, K: float) -> bool:
    return math.cos(delta * n) < K


def optimal_beamsplitter_state(delta: float, q: float) -> BeamsplitterOptimum:
    d = canonical_delta(delta)
    if d == 0.0:
        raise DevicesIdenticalError("devices identical: delta = 0 cannot be discriminated")
    if not (0.0 < q <= 0.5):
        raise DomainError(f"error probability q must lie in (0, 1/2], got {q!r}")
    K = overlap_for_error(q)
    n_tilde = solve_n_tilde(d)
    lo, hi = max(1, math.floor(n_tilde)), math.ceil(n_tilde)
    candidates = [n for n in sorted({lo, hi}) if _feasible(n, d, K)]
    if not candidates:
        # integer rounding can leave both neighbours of n_tilde infeasible
        limit = hi + math.ceil(2 * math.pi / d) + 1
        candidates = [next((n for n in range(hi + 1, limit) if _feasible(n, d, K)), None)]
        if candidates[0] is None:
            raise InternalInvariantError(f"no feasible NOON branch for delta={d!r}, K={K!r}")

    best_n, best_e = candidates[0], energy_single_noon(candidates[0], d, K)
    for n in candidates[1:]:
        e = energy_single_noon(n, d, K)
        if e < best_e * (1 - TIE_RTOL):
            best_n, best_e = n, e

    w = (1.0 - K) / (1.0 - math.cos(d * best_n))
    w = min(max(w, 0.0), 1.0)
    state = NoonPairState(n1=best_n, n2=0, a1=math.sqrt(w), a2=math.sqrt(1.0 - w), delta=d)
    point = TradeoffPoint(
        p_error=error_probability(abs(state.overlap())),
        mean_photons=state.mean_photons(),
        strategy=Strategy.ANALYTIC_BEAMSPLITTER,
        state_descriptor=state,
    )
    return BeamsplitterOptimum(n_star=best_n, n_tilde=n_tilde, state=state, point=point)


def beamsplitter_tradeoff_curve(delta: float, q_values: Iterable[float]) -> list[TradeoffPoint]:
    """Optimal (P_e, <N>) points, one per requested error level, in input order."""
    return [optimal_beamsplitter_state(delta, q).point for q in q_values]


def optimal_mean_photons(delta: float, q: float) -> float:
    return optimal_beamsplitter_state(delta, q).point.mean_photons

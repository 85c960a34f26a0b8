"""Coherent-state inputs with homodyne readout: the classical baseline.

With the homodyne phase absorbed into the coherent amplitude, each outcome is
a unit-variance Gaussian centred on ``2 Re(alpha)`` (identity) or
``2 Re(e^{i delta} alpha)`` (device). The best allocation of a photon budget
``eta`` puts everything on the mode with the largest phase magnitude.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import brentq

from .beamsplitter import optimal_mean_photons
from .fock import (
    DevicesIdenticalError,
    DeviceSpec,
    DomainError,
    Strategy,
    TradeoffPoint,
    wrap_phase,
)

_PPF_BRACKET = 40.0


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_ppf(p: float) -> float:
    """Inverse of :func:`normal_cdf`, by bracketed root finding.

    The lower tail is solved directly and the upper tail by symmetry, so that
    small tail probabilities keep full relative precision.
    """
    if not (0.0 < p < 1.0):
        raise DomainError(f"probability {p!r} outside (0, 1)")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -normal_ppf(1.0 - p)
    return brentq(lambda x: normal_cdf(x) - p, -_PPF_BRACKET, 0.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def _require_sensitive(device: DeviceSpec) -> None:
    if device.delta_star == 0.0:
        raise DevicesIdenticalError("devices identical: all phases are zero")


@dataclass(frozen=True)
class CoherentStrategy:
    eta: float
    device: DeviceSpec
    best_mode: int
    alpha_star: complex

    def amplitudes(self) -> np.ndarray:
        """Coherent amplitude per mode (vacuum everywhere except ``best_mode``)."""
        out = np.zeros(self.device.mode_count, dtype=complex)
        out[self.best_mode] = self.alpha_star
        return out

    def mean_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        alpha = self.amplitudes()
        v0 = 2.0 * alpha.real
        v1 = 2.0 * (np.exp(1j * np.asarray(self.device.phases)) * alpha).real
        return v0, v1

    def separation_squared(self) -> float:
        v0, v1 = self.mean_vectors()
        return float(np.sum((v0 - v1) ** 2))


def optimal_coherent_strategy(eta: float, device: DeviceSpec) -> CoherentStrategy:
    if eta < 0:
        raise DomainError(f"eta must be non-negative, got {eta!r}")
    _require_sensitive(device)
    i = device.best_mode
    delta = device.phases[i]
    alpha = math.sqrt(eta) * cmath.exp(1j * (math.pi - delta) / 2)
    return CoherentStrategy(eta=eta, device=device, best_mode=i, alpha_star=alpha)


def coherent_error(eta: float, device: DeviceSpec) -> float:
    if eta < 0:
        raise DomainError(f"eta must be non-negative, got {eta!r}")
    _require_sensitive(device)
    a = 2.0 * math.sqrt(eta) * math.sin(device.delta_star / 2)
    return 0.5 * (1.0 + normal_cdf(-a) - normal_cdf(a))


def coherent_energy_for_error(q: float, device: DeviceSpec) -> CoherentStrategy:
    """Smallest photon budget at which coherent/homodyne reaches error q."""
    if not (0.0 < q < 0.5):
        raise DomainError(f"error probability q must lie in (0, 1/2), got {q!r}")
    _require_sensitive(device)
    a = -normal_ppf(q)
    eta = (a / (2.0 * math.sin(device.delta_star / 2))) ** 2
    return optimal_coherent_strategy(eta, device)


def coherent_tradeoff_curve(device: DeviceSpec, q_values: Iterable[float]) -> list[TradeoffPoint]:
    points = []
    for q in q_values:
        strat = coherent_energy_for_error(q, device)
        points.append(
            TradeoffPoint(
                p_error=coherent_error(strat.eta, device),
                mean_photons=strat.eta,
                strategy=Strategy.COHERENT_HOMODYNE,
                state_descriptor=strat,
            )
        )
    return points


def beamsplitter_delta(device: DeviceSpec) -> float:
    """Return delta for a device of the form [delta, -delta]; raise otherwise."""
    if device.mode_count != 2:
        raise DomainError("advantage ratio needs a two-mode beamsplitter device")
    d0, d1 = device.phases
    if abs(wrap_phase(d0 + d1)) > 1e-12:
        raise DomainError(f"phases {device.phases} are not of the form [delta, -delta]")
    return abs(d0)


def advantage_ratio(device: DeviceSpec, q: float) -> float:
    """Coherent photon budget over the optimal mean photon number at error q."""
    delta = beamsplitter_delta(device)
    eta = coherent_energy_for_error(q, device).eta
    return eta / optimal_mean_photons(delta, q)

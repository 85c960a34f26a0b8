"""Brute-force and quadrature cross-checks.

None of these are used by the production paths. They exist so that tests and
``optodiscrim verify`` can compare the fast formulas against something that
shares no code with them: exhaustive enumeration, grid search, scipy
quadrature, and finite differences on explicit dense operators.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .fock import (
    DevicesIdenticalError,
    DeviceSpec,
    DomainError,
    TruncatedState,
    fock_basis,
    wrap_phase,
)

N_MAX_DEFAULT = 64
_COS_EQ_TOL = 1e-15
_TIE_RTOL = 1e-12


class FiniteDifferenceWarning(RuntimeWarning):
    """Central differences at step h and h/2 disagree; the step is probably too small."""


@dataclass(frozen=True)
class PairSearchResult:
    best_n1: int
    best_n2: int
    best_mean_photons: float
    scanned_pairs: int
    # weight on best_n1 in the minimizing superposition
    best_weight1: float = float("nan")


def _pair_mean_photons(n1: int, n2: int, c1: float, c2: float, K: float) -> float:
    return (n2 * c1 - n1 * c2 + K * (n1 - n2)) / (c1 - c2)


def exhaustive_pair_search(delta: float, K: float, n_max: int = N_MAX_DEFAULT) -> PairSearchResult:
    """Minimize <N> over every two-term NOON superposition with n1 < n2 <= n_max."""
    d = abs(wrap_phase(float(delta)))
    if d == 0.0:
        raise DevicesIdenticalError("devices identical: delta = 0")
    if not (0.0 <= K <= 1.0):
        raise DomainError(f"K must lie in [0, 1], got {K!r}")
    if n_max < math.ceil(math.pi / d):
        raise DomainError(f"n_max={n_max} must be at least ceil(pi/delta)={math.ceil(math.pi / d)}")

    cosines = [math.cos(d * n) for n in range(n_max + 1)]
    best = None
    scanned = 0
    for n1, n2 in itertools.combinations(range(n_max + 1), 2):
        scanned += 1
        c1, c2 = cosines[n1], cosines[n2]
        if abs(c1 - c2) <= _COS_EQ_TOL or not (min(c1, c2) <= K <= max(c1, c2)):
            continue
        N = _pair_mean_photons(n1, n2, c1, c2, K)
        if best is None or N < best[0] - _TIE_RTOL * max(abs(best[0]), 1e-300):
            w1 = (c2 - K) / (c2 - c1)
            best = (N, n1, n2, w1)
    if best is None:
        raise DomainError(f"no feasible pair with n <= {n_max} for K={K!r}")
    N, n1, n2, w1 = best
    return PairSearchResult(n1, n2, N, scanned, w1)


def _distinct_points(device: DeviceSpec, cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    basis = fock_basis(device.mode_count, cutoff)
    z = np.exp(1j * device.phase_vector(basis))
    n = np.array([sum(k) for k in basis], dtype=float)
    keep: list[int] = []
    for i in range(len(basis)):
        if not any(n[j] == n[i] and abs(z[j] - z[i]) < 1e-12 for j in keep):
            keep.append(i)
    return z[keep], n[keep]


def _simplex_grid(resolution: int) -> np.ndarray:
    r = resolution
    rows = [(i, j, r - i - j) for i in range(r + 1) for j in range(r + 1 - i)]
    return np.array(rows, dtype=float) / r


def dense_grid_search(
    device: DeviceSpec, cutoff: int, K: float, grid_resolution: int = 60
) -> float:
    """Upper bound on min <N> subject to |<U>| = K, by grid search over weights.

    Only supports of at most three distinct (photon number, phase) points are
    gridded: the optimum of a linear objective over the convex set of
    achievable (<U>, <N>) lies on a face spanned by three vertices. Any grid
    point whose overlap modulus is below K is topped up with vacuum weight
    until the constraint holds exactly, so every returned value is attained by
    an actual state.
    """
    if cutoff > 5:
        raise DomainError("dense_grid_search is limited to cutoff <= 5")
    if not (0.0 <= K <= 1.0):
        raise DomainError(f"K must lie in [0, 1], got {K!r}")
    z, n = _distinct_points(device, cutoff)
    W = _simplex_grid(grid_resolution)
    best = math.inf
    m = len(z)
    triples = itertools.combinations(range(m), 3) if m >= 3 else [tuple(range(m)) + (0,) * (3 - m)]
    for tri in triples:
        idx = list(tri)
        zz = W @ z[idx]
        nn = W @ n[idx]
        mod = np.abs(zz)
        ok = mod <= K + 1e-12
        if not np.any(ok):
            continue
        zz, nn = zz[ok], nn[ok]
        # solve |(1-t) z + t| = K for the smallest t in [0, 1]
        a = np.abs(1.0 - zz) ** 2
        b = 2.0 * np.real(np.conj(zz) * (1.0 - zz))
        c = np.minimum(np.abs(zz) ** 2 - K * K, 0.0)
        disc = np.maximum(b * b - 4.0 * a * c, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(a > 1e-300, (-b + np.sqrt(disc)) / (2.0 * a), 0.0)
        t = np.clip(t, 0.0, 1.0)
        cand = float(np.min((1.0 - t) * nn))
        best = min(best, cand)
    if not math.isfinite(best):
        raise DomainError(f"K={K!r} is not reachable at cutoff {cutoff}")
    return best


def _gaussian_density(u: float) -> float:
    return math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)


def gaussian_halfspace_error(eta: float, delta_star: float) -> float:
    """Error of the likelihood-ratio guess between the two homodyne Gaussians.

    Builds the coherent amplitude on the most sensitive mode, projects both
    unit-variance Gaussians onto the line through their means, and integrates
    each density over the decision half-line with adaptive quadrature.
    """
    if eta < 0:
        raise DomainError(f"eta must be non-negative, got {eta!r}")
    alpha = math.sqrt(eta) * complex(math.cos((math.pi - delta_star) / 2), math.sin((math.pi - delta_star) / 2))
    v0 = 2.0 * alpha.real
    v1 = 2.0 * (complex(math.cos(delta_star), math.sin(delta_star)) * alpha).real
    dist = abs(v1 - v0)
    if dist == 0.0:
        return 0.5
    # in coordinates u along (v1 - v0) with v0 at the origin, A = {u >= dist/2}
    mass0, _ = integrate.quad(_gaussian_density, dist / 2, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    mass1, _ = integrate.quad(
        lambda u: _gaussian_density(u - dist), dist / 2, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200
    )
    return 0.5 + 0.5 * (mass0 - mass1)


def _dense_operators(device: DeviceSpec, indices) -> tuple[np.ndarray, np.ndarray]:
    totals = np.array([sum(k) for k in indices], dtype=float)
    phases = np.array([sum(d * nj for d, nj in zip(device.phases, k)) for k in indices])
    return np.diag(totals).astype(complex), np.diag(np.exp(1j * phases))


def unnormalized_cost(vec: np.ndarray, N_op: np.ndarray, U_op: np.ndarray, p: float) -> float:
    """p <v|N|v> + (1-p) |<v|U|v>|^2 for an arbitrary (unnormalized) vector."""
    n = np.vdot(vec, N_op @ vec).real
    u = np.vdot(vec, U_op @ vec)
    return float(p * n + (1 - p) * abs(u) ** 2)


def finite_difference_gradient(
    state: TruncatedState, device: DeviceSpec, p: float, step: float = 1e-7
) -> np.ndarray:
    """dC/d<psi| by central differences, aligned with ``state.indices``.

    Each amplitude's real and imaginary parts are perturbed separately and the
    two partial derivatives are reassembled as ``(dC/dx + i dC/dy) / 2``, the
    conjugate Wirtinger derivative of the unnormalized cost. A second pass at
    step/2 flags cancellation.
    """
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    if state.mode_count != device.mode_count:
        raise DomainError("state and device mode counts differ")
    N_op, U_op = _dense_operators(device, state.indices)
    psi = np.array(state.amps, dtype=complex)

    def central(h: float) -> np.ndarray:
        g = np.zeros(psi.size, dtype=complex)
        for k in range(psi.size):
            parts = []
            for direction in (1.0, 1j):
                e = np.zeros(psi.size, dtype=complex)
                e[k] = direction * h
                fp = unnormalized_cost(psi + e, N_op, U_op, p)
                fm = unnormalized_cost(psi - e, N_op, U_op, p)
                parts.append((fp - fm) / (2 * h))
            g[k] = 0.5 * (parts[0] + 1j * parts[1])
        return g

    g_h = central(step)
    g_half = central(step / 2)
    scale = max(float(np.max(np.abs(g_h))), 1.0)
    if float(np.max(np.abs(g_h - g_half))) > 1e-5 * scale:
        warnings.warn(
            f"finite differences at step {step:g} and {step / 2:g} disagree; "
            "cancellation error likely dominates",
            FiniteDifferenceWarning,
            stacklevel=2,
        )
    return g_h

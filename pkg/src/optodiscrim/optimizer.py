"""Steepest descent on the unit sphere of a truncated Fock space.

Minimizes ``C(psi) = p <N> + (1 - p) |<U>|^2`` for a diagonal passive device.
Each step moves to ``(1 - alpha) psi - alpha dC/d<psi|`` and renormalizes;
the step is shrunk whenever the cost would go up. Sweeping ``p`` traces the
energy/error frontier, which is then reduced to its lower convex hull.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .fock import (
    DeviceSpec,
    DimensionError,
    DomainError,
    FockIndex,
    Strategy,
    TradeoffPoint,
    TruncatedState,
    fock_basis,
    point_from_state,
)

ALPHA_FLOOR = 1e-15
ALPHA_CEIL = 1e3
ALPHA_GROWTH = 2.0
SATURATION_WEIGHT = 1e-6
# amplitude floor mixed into warm starts so no component is stuck at zero
WARM_START_FLOOR = 1e-6


@dataclass(frozen=True)
class OptimizerConfig:
    p: float = 0.5
    alpha: float = 0.1
    cutoff: int = 8
    max_iters: int = 200_000
    grad_tol: float = 1e-12
    backtrack_factor: float = 0.5
    seed: int = 0
    patience: int = 50

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not (0.0 < self.backtrack_factor < 1.0):
            raise DomainError(f"backtrack_factor must lie in (0, 1), got {self.backtrack_factor!r}")
        if self.cutoff < 1:
            raise DomainError(f"cutoff must be a positive integer, got {self.cutoff!r}")
        if self.max_iters < 1 or self.patience < 1:
            raise DomainError("max_iters and patience must be positive")
        if not self.grad_tol > 0:
            raise DomainError(f"grad_tol must be positive, got {self.grad_tol!r}")


@dataclass(frozen=True, eq=False)
class OptimizerTrace:
    iterations: int
    cost_history: list[float]
    final_state: TruncatedState
    final_point: TradeoffPoint
    converged: bool
    cutoff_saturated: bool
    p: float = float("nan")
    cutoff: int = 0
    accepted_alphas: list[float] = field(default_factory=list, repr=False)


def _check_p(p: float) -> None:
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0, 1), got {p!r}")


def _phase_factors(state: TruncatedState, device: DeviceSpec) -> np.ndarray:
    if state.mode_count != device.mode_count:
        raise DimensionError(
            f"state has {state.mode_count} modes, device has {device.mode_count}"
        )
    return np.exp(1j * device.phase_vector(state.indices))


# Array kernels. ``n`` holds total photon numbers and ``z`` the phase factor
# exp(i delta . k) of each basis vector; ``a`` is the amplitude vector.

def _cost(a: np.ndarray, n: np.ndarray, z: np.ndarray, p: float) -> float:
    w = a.real**2 + a.imag**2
    u = np.dot(w, z)
    return float(p * np.dot(w, n) + (1 - p) * (u.real**2 + u.imag**2))


def _gradient(a: np.ndarray, n: np.ndarray, z: np.ndarray, p: float) -> np.ndarray:
    w = a.real**2 + a.imag**2
    u = np.dot(w, z)
    # <U> U^dagger + <U>^* U is diagonal with entries 2 Re(<U> conj(z_k))
    return (p * n + 2 * (1 - p) * (u * np.conj(z)).real) * a


def _step(
    a: np.ndarray, c0: float, n: np.ndarray, z: np.ndarray, p: float, alpha: float, factor: float
) -> tuple[np.ndarray, float, float, bool]:
    """One backtracking step. Returns (new a, alpha used, new cost, stagnated)."""
    g = _gradient(a, n, z, p)
    scale = a + g  # (1 - alpha) a - alpha g == a - alpha (a + g)

    def trial(al):
        cand = a - al * scale
        nrm = np.linalg.norm(cand)
        if not (nrm > 0 and math.isfinite(nrm)):
            return None, math.inf
        cand = cand / nrm
        return cand, _cost(cand, n, z, p)

    while alpha >= ALPHA_FLOOR:
        cand, c1 = trial(alpha)
        if c1 <= c0:
            break
        alpha *= factor
    else:
        return a, alpha, c0, True
    return cand, alpha, c1, False


def cost(state: TruncatedState, device: DeviceSpec, p: float) -> float:
    """``p <N> + (1 - p) |<U>|^2``."""
    _check_p(p)
    z = _phase_factors(state, device)
    return _cost(np.asarray(state.amps), state.totals, z, p)


def cost_gradient(state: TruncatedState, device: DeviceSpec, p: float) -> np.ndarray:
    """dC/d<psi|, aligned with ``state.indices`` (not normalized)."""
    _check_p(p)
    z = _phase_factors(state, device)
    return _gradient(np.asarray(state.amps), state.totals, z, p)


def descend_step(
    state: TruncatedState, device: DeviceSpec, config: OptimizerConfig, current_alpha: float
) -> tuple[TruncatedState, float]:
    """Take one monotone descent step.

    Returns the accepted state and the step size that produced it. If no step
    above 1e-15 lowers the cost, the input state comes back unchanged together
    with the (sub-floor) step size, which callers treat as convergence.
    """
    z = _phase_factors(state, device)
    a = np.asarray(state.amps)
    n = state.totals
    c0 = _cost(a, n, z, config.p)
    new, alpha, _, _ = _step(a, c0, n, z, config.p, current_alpha, config.backtrack_factor)
    return TruncatedState(state.cutoff, state.indices, new), alpha


def initial_state(device: DeviceSpec, cutoff: int, seed: int = 0) -> TruncatedState:
    """Seeded start: vacuum and single-mode-occupied indices, plus noise everywhere.

    Amplitudes are real and non-negative, and every basis vector gets some weight.
    """
    basis = fock_basis(device.mode_count, cutoff)
    rng = np.random.default_rng(seed)
    base = np.array([1.0 if sum(1 for nj in k if nj) <= 1 else 0.0 for k in basis])
    a = base + 0.1 * rng.random(len(basis))
    return TruncatedState.from_vector(basis, a / np.linalg.norm(a), cutoff)


def _embed(state: TruncatedState, basis: Sequence[FockIndex]) -> np.ndarray:
    pos = {k: i for i, k in enumerate(basis)}
    out = np.zeros(len(basis), dtype=complex)
    for k, amp in zip(state.indices, state.amps):
        if k in pos:
            out[pos[k]] = amp
    return out


def optimize(
    device: DeviceSpec,
    config: OptimizerConfig,
    start: TruncatedState | None = None,
    callback: Callable[[int, np.ndarray, float], None] | None = None,
) -> OptimizerTrace:
    """Run the descent to convergence or ``max_iters``.

    ``start`` warm-starts from an earlier solution (re-embedded into the basis
    at ``config.cutoff``). ``callback(iteration, amplitudes, cost)`` sees every
    accepted iterate, including the starting point as iteration 0.
    """
    basis = fock_basis(device.mode_count, config.cutoff)
    if len(basis) < 2:
        raise DomainError("cutoff leaves no phase-sensitive basis vector")
    seeded = np.asarray(initial_state(device, config.cutoff, config.seed).amps)
    if start is None:
        a = seeded.copy()
    else:
        if start.mode_count != device.mode_count:
            raise DimensionError("warm start has the wrong mode count")
        a = _embed(start, basis) + WARM_START_FLOOR * seeded
        a = a / np.linalg.norm(a)
    n = np.array([sum(k) for k in basis], dtype=float)
    z = np.exp(1j * device.phase_vector(basis))
    p = config.p

    c = _cost(a, n, z, p)
    history = [c]
    alphas: list[float] = []
    if callback is not None:
        callback(0, a, c)
    alpha = config.alpha
    quiet = 0
    converged = False
    it = 0
    while it < config.max_iters:
        it += 1
        a_new, used, c_new, stagnated = _step(a, c, n, z, p, alpha, config.backtrack_factor)
        if stagnated:
            converged = True
            break
        rel = (c - c_new) / max(abs(c), 1e-300)
        a, c = a_new, c_new
        history.append(c)
        alphas.append(used)
        if callback is not None:
            callback(it, a, c)
        quiet = quiet + 1 if rel < config.grad_tol else 0
        if quiet >= config.patience:
            converged = True
            break
        alpha = min(used * ALPHA_GROWTH, ALPHA_CEIL)

    state = TruncatedState.from_vector(basis, a, config.cutoff)
    edge = n >= config.cutoff - 1
    saturated = bool(np.sum(np.abs(a[edge]) ** 2) > SATURATION_WEIGHT)
    return OptimizerTrace(
        iterations=it,
        cost_history=history,
        final_state=state,
        final_point=point_from_state(state, device, Strategy.ITERATIVE),
        converged=converged,
        cutoff_saturated=saturated,
        p=p,
        cutoff=config.cutoff,
        accepted_alphas=alphas,
    )


def run_sweep(
    device: DeviceSpec, p_grid: Iterable[float], config: OptimizerConfig
) -> list[OptimizerTrace]:
    """One optimizer run per p (ascending), each warm-started from the last."""
    traces: list[OptimizerTrace] = []
    prev: TruncatedState | None = None
    for p in sorted(p_grid):
        tr = optimize(device, replace(config, p=p), start=prev)
        traces.append(tr)
        prev = tr.final_state
    return traces


def refine_sweep(
    device: DeviceSpec,
    traces: Sequence[OptimizerTrace],
    config: OptimizerConfig,
    max_gap: float = 0.01,
    max_new: int = 200,
) -> list[OptimizerTrace]:
    """Bisect in p wherever neighbouring sweep points are > ``max_gap`` apart.

    The gap is the larger of the P_e and <N> differences. A fixed p grid
    samples the frontier unevenly: near the vacuum transition P_e climbs to
    1/2 within a sliver of p, and near P_e = 0 the photon number is steep, so
    a linear interpolant across either stretch misses the curved frontier.
    The widest gap is split first, each new run warm-started from its lower
    neighbour, until every gap fits or ``max_new`` runs have been added.
    """
    if not max_gap > 0:
        raise DomainError(f"max_gap must be positive, got {max_gap!r}")
    out = sorted(traces, key=lambda tr: tr.p)

    def gap(i: int) -> float:
        a, b = out[i].final_point, out[i + 1].final_point
        if not out[i].p < 0.5 * (out[i].p + out[i + 1].p) < out[i + 1].p:
            return 0.0  # p resolution exhausted
        return max(abs(b.p_error - a.p_error), abs(b.mean_photons - a.mean_photons))

    for _ in range(max_new):
        gaps = [gap(i) for i in range(len(out) - 1)]
        if not gaps or max(gaps) <= max_gap:
            break
        i = gaps.index(max(gaps))
        mid = 0.5 * (out[i].p + out[i + 1].p)
        out.insert(i + 1, optimize(device, replace(config, p=mid), start=out[i].final_state))
    return out


def lower_frontier(items: Sequence, key: Callable = lambda pt: (pt.p_error, pt.mean_photons)) -> list:
    """Lower convex hull in the (P_e, <N>) plane, cut at its minimum energy.

    Returns the surviving items sorted by P_e. Along the result P_e increases
    and <N> does not increase.
    """
    pts = sorted(items, key=lambda it: key(it))
    hull: list = []
    for it in pts:
        x, y = key(it)
        if hull and key(hull[-1])[0] == x:
            # same error, keep the cheaper one
            if y >= key(hull[-1])[1]:
                continue
            hull.pop()
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = key(hull[-2]), key(hull[-1])
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(it)
    if not hull:
        return hull
    ys = [key(h)[1] for h in hull]
    return hull[: ys.index(min(ys)) + 1]


def trace_frontier(
    device: DeviceSpec,
    p_grid: Iterable[float],
    config: OptimizerConfig | None = None,
    max_gap: float | None = None,
) -> list[TradeoffPoint]:
    """Hulled frontier points, sorted by P_e; each carries its achieving state.

    With ``max_gap`` set, the sweep is first densified by :func:`refine_sweep`.
    """
    config = config or OptimizerConfig()
    traces = run_sweep(device, p_grid, config)
    if max_gap is not None and traces:
        traces = refine_sweep(device, traces, config, max_gap)
    return [tr.final_point for tr in lower_frontier(traces, key=_trace_key)]


def _trace_key(tr: OptimizerTrace) -> tuple[float, float]:
    return tr.final_point.p_error, tr.final_point.mean_photons


def cost_gap(a: Sequence[OptimizerTrace], b: Sequence[OptimizerTrace]) -> float:
    """Largest per-p difference in final cost between two sweeps over one p grid.

    The optimal cost at each p is the support function of the achievable
    (|<U>|^2, <N>) set, so it pins down the frontier. Unlike the minimizing
    (P_e, <N>) point it is unique at ties, and it reacts linearly rather than
    as a square root to leftover weight near the vacuum.
    """
    if [tr.p for tr in a] != [tr.p for tr in b]:
        raise DomainError("sweeps were run on different p grids")
    return max((abs(x.cost_history[-1] - y.cost_history[-1]) for x, y in zip(a, b)), default=0.0)


def sweep_with_cutoff_refinement(
    device: DeviceSpec,
    p_grid: Iterable[float],
    config: OptimizerConfig,
    stability: float = 1e-6,
    max_cutoff: int = 64,
    max_gap: float | None = None,
) -> tuple[list[OptimizerTrace], bool]:
    """Double the cutoff until the per-p optimal cost moves less than ``stability``.

    Movement is measured by :func:`cost_gap`. With ``max_gap`` set, the p grid
    is densified once at the starting cutoff and then held fixed, so that
    successive cutoffs are compared point by point. Returns the traces at the
    final cutoff and whether stability was reached.
    """
    traces = run_sweep(device, p_grid, config)
    if max_gap is not None and traces:
        traces = refine_sweep(device, traces, config, max_gap)
    p_grid = [tr.p for tr in traces]
    cutoff = config.cutoff
    while cutoff * 2 <= max_cutoff:
        cutoff *= 2
        finer = run_sweep(device, p_grid, replace(config, cutoff=cutoff))
        moved = cost_gap(traces, finer)
        traces = finer
        if moved < stability:
            return traces, True
    return traces, False


def frontier_photons_at(points: Sequence[TradeoffPoint], q: float) -> float:
    """Linear interpolation of <N> along a P_e-sorted frontier."""
    xs = [pt.p_error for pt in points]
    ys = [pt.mean_photons for pt in points]
    if not xs or q < xs[0] or q > xs[-1]:
        raise DomainError(f"P_e={q!r} outside the frontier span")
    return float(np.interp(q, xs, ys))


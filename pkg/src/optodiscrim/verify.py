"""Oracle-agreement suites behind ``optodiscrim verify``.

Each suite yields :class:`Check` records (name, tolerance, observed deviation).
The acceptance tests run the same comparisons, so a green ``verify`` and a
green test run mean the same thing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import beamsplitter as bs
from . import coherent as ch
from . import oracle
from .fock import DeviceSpec, TruncatedState, expect_unitary, fock_basis, mean_photons, overlap_for_error
from .optimizer import OptimizerConfig, cost_gradient, optimize

DELTAS = (math.pi / 12, math.pi / 8, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)
QS = (0.05, 0.1, 0.2, 0.3, 0.4)


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    deviation: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: deviation {self.deviation:.3e} (tolerance {self.tolerance:.1e})"


def _grid():
    for d in DELTAS:
        for q in QS:
            yield d, q


def constraint_checks() -> Iterator[Check]:
    """Analytic optimum meets <U> = K and P_e = q; materialized state agrees with closed forms."""
    dev_k = dev_q = dev_u = dev_n = dev_pair = 0.0
    for d, q in _grid():
        opt = bs.optimal_beamsplitter_state(d, q)
        K = overlap_for_error(q)
        st = opt.state
        dev_k = max(dev_k, abs(st.overlap() - K))
        dev_q = max(dev_q, abs(opt.point.p_error - q))
        psi = st.to_state()
        dev_u = max(dev_u, abs(expect_unitary(psi, st.device) - st.overlap()))
        closed_n = bs.energy_single_noon(opt.n_star, d, K)
        dev_n = max(dev_n, abs(mean_photons(psi) - closed_n))
        c1, c0 = math.cos(d * opt.n_star), 1.0
        pair_n = (0 * c1 - opt.n_star * c0 + K * (opt.n_star - 0)) / (c1 - c0)
        dev_pair = max(dev_pair, abs(pair_n - closed_n))
    yield Check("overlap equals K(q)", 1e-10, dev_k)
    yield Check("error probability equals q", 1e-10, dev_q)
    yield Check("materialized <U> equals closed form", 1e-12, dev_u)
    yield Check("materialized <N> equals single-NOON energy", 1e-12, dev_n)
    yield Check("two-term energy formula equals single-NOON energy", 1e-12, dev_pair)


def pair_checks(n_max: int = oracle.N_MAX_DEFAULT) -> Iterator[Check]:
    dev = 0.0
    for d, q in _grid():
        ref = oracle.exhaustive_pair_search(d, overlap_for_error(q), n_max)
        dev = max(dev, abs(ref.best_mean_photons - bs.optimal_mean_photons(d, q)))
    yield Check(f"exhaustive pair search (n <= {n_max}) vs analytic <N>", 1e-9, dev)


def grid_checks(resolution: int = 60) -> Iterator[Check]:
    d = math.pi / 4
    analytic = bs.optimal_mean_photons(d, 0.1)
    found = oracle.dense_grid_search(DeviceSpec.beamsplitter(d), 4, overlap_for_error(0.1), resolution)
    # the grid value is attained by a real state, so it can never undercut the optimum
    yield Check("dense grid never below analytic optimum", 1e-12, max(0.0, analytic - found))
    yield Check("dense grid within grid tolerance of analytic", 1.0 / resolution, abs(found - analytic))
    found = oracle.dense_grid_search(DeviceSpec((math.pi, -math.pi)), 1, 0.0, resolution)
    yield Check("dense grid at cutoff 1, K=0 gives 1/2", 1e-12, abs(found - 0.5))


def gaussian_checks(seed: int = 0, cases: int = 10) -> Iterator[Check]:
    rng = np.random.default_rng(seed)
    etas = np.concatenate([[0.0], rng.uniform(0.0, 10.0, cases - 1)])
    deltas = np.concatenate([[math.pi / 3], math.pi * (1.0 - rng.random(cases - 1))])
    dev = 0.0
    for eta, d in zip(etas, deltas):
        closed = ch.coherent_error(float(eta), DeviceSpec((float(d),)))
        dev = max(dev, abs(oracle.gaussian_halfspace_error(float(eta), float(d)) - closed))
    yield Check(f"half-space quadrature vs closed form ({cases} cases)", 1e-8, dev)
    yield Check("eta = 0 gives exactly 1/2", 0.0, abs(oracle.gaussian_halfspace_error(0.0, 1.0) - 0.5))


def random_dense_state(rng: np.random.Generator, mode_count: int, cutoff: int) -> TruncatedState:
    basis = fock_basis(mode_count, cutoff)
    v = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    return TruncatedState.from_vector(basis, v / np.linalg.norm(v), cutoff)


def gradient_checks(seed: int = 0, cases: int = 20, step: float = 1e-7) -> Iterator[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        state = random_dense_state(rng, 2, 4)
        dev = DeviceSpec(tuple(rng.uniform(-math.pi, math.pi, 2)))
        p = float(rng.uniform(0.05, 0.95))
        g = cost_gradient(state, dev, p)
        fd = oracle.finite_difference_gradient(state, dev, p, step)
        worst = max(worst, float(np.max(np.abs(g - fd)) / np.max(np.abs(g))))
    yield Check(f"analytic gradient vs finite differences ({cases} states)", 1e-6, worst)


def descent_checks(seed: int = 0, starts: int = 10, iters: int = 300) -> Iterator[Check]:
    rng = np.random.default_rng(seed)
    rise = norm_dev = 0.0
    for s in range(starts):
        dev = DeviceSpec(tuple(rng.uniform(-math.pi, math.pi, 2)))
        p = float(rng.uniform(0.05, 0.95))
        cfg = OptimizerConfig(p=p, cutoff=6, max_iters=iters, seed=seed + s)
        seen: list[float] = []

        def cb(_it, a, c, seen=seen):
            nonlocal norm_dev
            seen.append(c)
            norm_dev = max(norm_dev, abs(float(np.linalg.norm(a)) - 1.0))

        optimize(dev, cfg, callback=cb)
        rise = max([rise] + [b - a for a, b in zip(seen, seen[1:])])
    yield Check(f"cost never increases ({starts} runs)", 1e-12, max(rise, 0.0))
    yield Check("iterates stay unit norm", 1e-12, norm_dev)


def claim_checks() -> Iterator[Check]:
    r4 = ch.advantage_ratio(DeviceSpec.beamsplitter(math.pi / 4), 0.1)
    r12 = ch.advantage_ratio(DeviceSpec.beamsplitter(math.pi / 12), 0.1)
    yield Check("ratio at delta=pi/4, q=0.1 within [3.5, 4.5]", 0.0, max(0.0, 3.5 - r4, r4 - 4.5))
    yield Check("ratio at delta=pi/12, q=0.1 within [10.5, 13]", 0.0, max(0.0, 10.5 - r12, r12 - 13.0))
    rs = [ch.advantage_ratio(DeviceSpec.beamsplitter(math.pi / 4), q) for q in (0.05, 0.1, 0.2, 0.3)]
    rises = sum(1 for a, b in zip(rs, rs[1:]) if b >= a)
    yield Check("ratio strictly decreasing in q at delta=pi/4 (count of violations)", 0.0, float(rises))


SUITES: dict[str, Callable[[], Iterator[Check]]] = {
    "constraints": constraint_checks,
    "pairs": pair_checks,
    "grid": grid_checks,
    "gaussian": gaussian_checks,
    "gradient": gradient_checks,
    "descent": descent_checks,
    "claims": claim_checks,
}


def run(selector: str = "all") -> list[tuple[str, Check]]:
    names = list(SUITES) if selector == "all" else [selector]
    return [(name, check) for name in names for check in SUITES[name]()]

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optodiscrim.fock import (
    DeviceSpec,
    DimensionError,
    DomainError,
    Strategy,
    TradeoffPoint,
    TruncatedState,
    error_probability,
    evolve,
    expect_unitary,
    fock_basis,
    mean_photons,
    overlap_for_error,
    point_from_state,
    wrap_phase,
)

S2 = 1 / math.sqrt(2)


def noon(n, modes=2):
    return TruncatedState.from_amplitudes({(n, 0): S2, (0, n): S2})


def random_state(rng, modes, cutoff, real=False):
    basis = fock_basis(modes, cutoff)
    v = rng.normal(size=len(basis))
    if not real:
        v = v + 1j * rng.normal(size=len(basis))
    return TruncatedState.from_vector(basis, v / np.linalg.norm(v), cutoff)


phases = st.floats(-20.0, 20.0, allow_nan=False)


# device


def test_phases_wrap_into_half_open_interval():
    dev = DeviceSpec((3 * math.pi, -math.pi, 0.5, 2 * math.pi + 0.25))
    assert dev.phases[0] == pytest.approx(math.pi)
    assert dev.phases[1] == pytest.approx(math.pi)
    assert dev.phases[2] == 0.5
    assert dev.phases[3] == pytest.approx(0.25)


@given(phases)
def test_wrap_phase_range_and_congruence(x):
    y = wrap_phase(x)
    assert -math.pi < y <= math.pi
    assert math.cos(y) == pytest.approx(math.cos(x), abs=1e-9)
    assert math.sin(y) == pytest.approx(math.sin(x), abs=1e-9)


def test_device_rejects_empty_and_nonfinite():
    with pytest.raises(DomainError):
        DeviceSpec(())
    with pytest.raises(DomainError):
        DeviceSpec((float("nan"),))
    with pytest.raises(DomainError):
        DeviceSpec((float("inf"), 0.0))


def test_best_mode_ties_go_to_lowest_index():
    assert DeviceSpec((0.3, -0.7, 0.7)).best_mode == 1
    assert DeviceSpec((0.3, -0.7, 0.7)).delta_star == pytest.approx(0.7)
    assert DeviceSpec.beamsplitter(0.4).phases == (0.4, -0.4)


def test_fock_basis_order_and_size():
    b = fock_basis(2, 3)
    assert b[0] == (0, 0)
    assert b[1:3] == [(1, 0), (0, 1)]
    assert len(b) == 10
    assert len(fock_basis(3, 4)) == math.comb(4 + 3, 3)
    assert all(sum(k) <= 4 for k in fock_basis(3, 4))


# states


def test_state_renormalizes_small_drift_and_rejects_large():
    s = TruncatedState.from_amplitudes({(0,): 1.0 + 2e-10})
    assert s.norm() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        TruncatedState.from_amplitudes({(0,): 1.1})


def test_state_rejects_bad_indices():
    with pytest.raises(DomainError):
        TruncatedState.from_amplitudes({(3, 0): 1.0}, cutoff=2)
    with pytest.raises(DimensionError):
        TruncatedState.from_amplitudes({(1, 0): S2, (1,): S2})
    with pytest.raises(DomainError):
        TruncatedState.from_amplitudes({(-1, 2): 1.0})


def test_state_is_immutable():
    s = noon(2)
    with pytest.raises(ValueError):
        s.amps[0] = 0.0


# expectations (examples from the operation contracts)


def test_vacuum_expectations():
    vac = TruncatedState.vacuum(3)
    dev = DeviceSpec((0.1, 2.0, -1.3))
    assert expect_unitary(vac, dev) == 1 + 0j
    assert mean_photons(vac) == 0.0


def test_noon_expectations():
    assert expect_unitary(noon(2), DeviceSpec.beamsplitter(math.pi / 2)) == pytest.approx(-1.0, abs=1e-15)
    assert mean_photons(noon(5)) == pytest.approx(5.0, abs=1e-14)


def test_vacuum_plus_noon_reaches_overlap_0_6():
    w3 = 0.234314575050762  # (1 - 0.6) / (1 - cos(3 pi / 4))
    s = TruncatedState.from_amplitudes(
        {(0, 0): math.sqrt(1 - w3), (3, 0): math.sqrt(w3 / 2), (0, 3): math.sqrt(w3 / 2)}
    )
    u = expect_unitary(s, DeviceSpec.beamsplitter(math.pi / 4))
    assert u.real == pytest.approx(0.6, abs=1e-12)
    assert abs(u.imag) < 1e-15
    assert mean_photons(s) == pytest.approx(3 * w3, abs=1e-14)


def test_mode_mismatch_raises():
    with pytest.raises(DimensionError):
        expect_unitary(noon(1), DeviceSpec((0.3,)))
    with pytest.raises(DimensionError):
        evolve(noon(1), DeviceSpec((0.3, 0.1, 0.2)))


def test_evolve_single_photon_eigenstate():
    d = 0.37
    s = evolve(TruncatedState.from_amplitudes({(1, 0): 1.0}), DeviceSpec.beamsplitter(d))
    assert s.amplitudes[(1, 0)] == pytest.approx(complex(math.cos(d), math.sin(d)), abs=1e-15)
    assert evolve(TruncatedState.vacuum(2), DeviceSpec.beamsplitter(d)).amplitudes == {(0, 0): 1 + 0j}


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 5))
def test_evolution_conserves_norm_and_photons(seed, modes, cutoff):
    rng = np.random.default_rng(seed)
    s = random_state(rng, modes, cutoff)
    dev = DeviceSpec(tuple(rng.uniform(-10, 10, modes)))
    out = evolve(s, dev)
    assert abs(out.norm() - 1.0) <= 1e-12
    assert abs(mean_photons(out) - mean_photons(s)) <= 1e-12
    assert abs(expect_unitary(s, dev)) <= 1 + 1e-12


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_expectations_depend_only_on_weights(seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, 2, 4)
    dev = DeviceSpec(tuple(rng.uniform(-math.pi, math.pi, 2)))
    mod = TruncatedState(s.cutoff, s.indices, np.abs(s.amps))
    assert expect_unitary(mod, dev) == pytest.approx(expect_unitary(s, dev), abs=1e-14)
    assert mean_photons(mod) == pytest.approx(mean_photons(s), abs=1e-13)


# error probability and its inverse


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (1.0, 0.5), (0.6, 0.1)])
def test_error_probability_examples(x, expected):
    assert error_probability(x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("q, expected", [(0.5, 1.0), (0.0, 0.0), (0.1, 0.6)])
def test_overlap_for_error_examples(q, expected):
    assert overlap_for_error(q) == pytest.approx(expected, abs=1e-15)


def test_error_probability_clamps_and_rejects():
    assert error_probability(1.0 + 5e-13) == 0.5
    assert error_probability(-5e-13) == 0.0
    with pytest.raises(DomainError):
        error_probability(1.0 + 1e-9)
    with pytest.raises(DomainError):
        error_probability(-1e-9)
    with pytest.raises(DomainError):
        overlap_for_error(0.5000001)
    with pytest.raises(DomainError):
        overlap_for_error(-0.1)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_error_probability_monotone(a, b):
    lo, hi = sorted((a, b))
    assert error_probability(lo) <= error_probability(hi)


def test_error_probability_extremes_only_at_endpoints():
    assert error_probability(1.0 - 1e-12) < 0.5
    assert error_probability(1e-100) > 0.0


@settings(max_examples=500)
@given(st.floats(0.0, 0.5 - 1e-4))
def test_overlap_error_inverse_pair(q):
    assert abs(error_probability(overlap_for_error(q)) - q) <= 1e-12


def test_overlap_error_inverse_near_half_is_conditioning_limited():
    # Near q = 1/2, 1 - K is of order (1/2 - q)^2 but K itself carries an
    # absolute rounding error of one ulp of 1. The inverse map amplifies that
    # by ~1/sqrt(1 - K), so the round trip cannot beat ~sqrt(eps) there.
    eps = np.finfo(float).eps
    for gap in (1e-5, 1e-8, 1e-12, 3e-16):
        q = 0.5 - gap
        err = abs(error_probability(overlap_for_error(q)) - q)
        assert err <= 4 * math.sqrt(eps)


# tradeoff points


def test_tradeoff_point_energy_is_derived():
    pt = TradeoffPoint(0.1, 0.7, "analytic-beamsplitter")
    assert pt.energy - pt.mean_photons == 0.5
    assert pt.strategy is Strategy.ANALYTIC_BEAMSPLITTER
    with pytest.raises(DomainError):
        TradeoffPoint(0.6, 0.0, Strategy.ORACLE)
    with pytest.raises(DomainError):
        TradeoffPoint(0.1, -1.0, Strategy.ORACLE)
    with pytest.raises(TypeError):
        TradeoffPoint(0.1, 0.5, Strategy.ORACLE, None, 1.0)


def test_point_from_state_recomputes():
    pt = point_from_state(noon(2), DeviceSpec.beamsplitter(math.pi / 2))
    assert pt.p_error == 0.5
    assert pt.mean_photons == pytest.approx(2.0)
    assert pt.energy == pytest.approx(2.5)

"""Minimum-energy discrimination of linear passive optical devices."""

__version__ = "0.1.0"

from .beamsplitter import (
    BeamsplitterOptimum,
    NoonPairState,
    beamsplitter_tradeoff_curve,
    energy_single_noon,
    optimal_beamsplitter_state,
    solve_n_tilde,
)
from .coherent import (
    CoherentStrategy,
    advantage_ratio,
    coherent_energy_for_error,
    coherent_error,
    coherent_tradeoff_curve,
    normal_cdf,
)
from .fock import (
    DeviceSpec,
    DevicesIdenticalError,
    DimensionError,
    DomainError,
    InfeasibleStateError,
    Strategy,
    TradeoffPoint,
    TruncatedState,
    error_probability,
    evolve,
    expect_unitary,
    mean_photons,
    overlap_for_error,
)
from .optimizer import OptimizerConfig, OptimizerTrace, cost, cost_gradient, descend_step, optimize, trace_frontier

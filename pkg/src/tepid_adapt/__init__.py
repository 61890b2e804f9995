"""Variational Gibbs-state preparation with an adaptively grown Pauli-exponential ansatz."""

from __future__ import annotations

from .ansatz import (
    AdaptiveAnsatz,
    ComputationalSubspace,
    invert_polar,
    polar_to_mu,
    prepare_purification,
)
from .circuits import GateCircuit, build_um_circuit
from .driver import (
    AdaptConfig,
    RunResult,
    energy_gaps_from_mu,
    extract_eigenstates,
    extrapolate_gibbs,
    initial_mu_optimization,
    run_tepid_adapt,
)
from .errors import (
    ConfigError,
    ContractViolation,
    DegeneracySplitError,
    HermiticityError,
    OptimizerStalled,
    PSDViolationError,
    ResourceError,
    TepidError,
)
from .fitting import FitResult, fit_curve
from .kernels import BACKEND
from .objective import CostPoint, analytic_gradient, free_energy, pool_gradients
from .optimize import OptimizerConfig, minimize
from .quantum import (
    DensityMatrix,
    Observable,
    PauliString,
    StateVector,
    fidelity,
    partial_trace_ancilla,
    pauli_pool,
    subspace_fidelity,
)
from .xxz import GibbsReference, XXZConfig, build_xxz, gibbs_exact, gibbs_truncated, xxz_reference

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AdaptConfig",
    "AdaptiveAnsatz",
    "ComputationalSubspace",
    "ConfigError",
    "ContractViolation",
    "CostPoint",
    "DegeneracySplitError",
    "DensityMatrix",
    "FitResult",
    "GateCircuit",
    "GibbsReference",
    "HermiticityError",
    "Observable",
    "OptimizerConfig",
    "OptimizerStalled",
    "PSDViolationError",
    "PauliString",
    "ResourceError",
    "RunResult",
    "StateVector",
    "TepidError",
    "XXZConfig",
    "analytic_gradient",
    "build_um_circuit",
    "build_xxz",
    "energy_gaps_from_mu",
    "extract_eigenstates",
    "extrapolate_gibbs",
    "fidelity",
    "fit_curve",
    "free_energy",
    "gibbs_exact",
    "gibbs_truncated",
    "initial_mu_optimization",
    "invert_polar",
    "minimize",
    "partial_trace_ancilla",
    "pauli_pool",
    "polar_to_mu",
    "pool_gradients",
    "prepare_purification",
    "run_tepid_adapt",
    "subspace_fidelity",
    "xxz_reference",
]

"""Adaptive Gibbs-state preparation loop, eigenstate extraction and extrapolation.

The loop grows ``V_A(theta)`` one Pauli exponential at a time: score every
pool word by its free-energy derivative at zero angle, append the steepest
one and re-optimize all angles (static and adaptive) with BFGS.  It stops
once the largest pool gradient drops to ``epsilon``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ansatz import (
    OPERATOR_ORDER,
    AdaptiveAnsatz,
    ComputationalSubspace,
    invert_polar,
    n_ancilla_for,
    polar_amplitudes,
    polar_jacobian,
    purification_matrix,
)
from .errors import ContractViolation, OptimizerStalled
from .objective import FreeEnergyModel, PoolEvaluator, entropy_gradient, shannon_entropy
from .optimize import OptimizerConfig, minimize
from .quantum import (
    DensityMatrix,
    Observable,
    PauliString,
    StateVector,
    expectation,
    pauli_pool,
    subspace_fidelity,
    von_neumann_entropy,
)
from .xxz import GibbsReference, relative_error

__all__ = [
    "AdaptConfig",
    "Eigenpair",
    "GapWarning",
    "RunResult",
    "TraceRow",
    "compare_eigenpairs",
    "energy_gaps_from_mu",
    "extract_eigenstates",
    "extrapolate_gibbs",
    "initial_mu_optimization",
    "invert_polar",
    "run_tepid_adapt",
    "state_free_energy",
]

log = logging.getLogger(__name__)

TIE_TOL = 1e-12


@dataclass(frozen=True)
class AdaptConfig:
    pool: tuple[PauliString, ...] | None = None  # None: every n_sites-qubit Pauli word
    epsilon: float = 1e-6
    max_operators: int = 200
    run_initial_mu_opt: bool = True
    seed: int = 0

    def resolved_pool(self, n_sites: int) -> tuple[PauliString, ...]:
        return tuple(self.pool) if self.pool is not None else tuple(pauli_pool(n_sites))


@dataclass
class TraceRow:
    """State of the loop after ``n_operators`` generators have been optimized."""

    n_operators: int
    free_energy: float
    pool_grad_norm: float
    chosen: str  # word appended next, "" on the final row
    n_params: int
    converged: bool  # inner optimizer reached its tolerance
    params: np.ndarray = field(repr=False)


@dataclass
class Eigenpair:
    energy: float
    state: StateVector
    subspace_index: int  # position of the computational label this state came from


@dataclass
class RunResult:
    hamiltonian: Observable
    beta_bar: float
    subspace: ComputationalSubspace
    phi_star: np.ndarray
    theta_star: np.ndarray
    operators: tuple[PauliString, ...]
    trace: list[TraceRow]
    eigenpairs: list[Eigenpair]
    gibbs_state: DensityMatrix
    terminated_by: str  # pool_tol | max_ops
    free_energy: float
    metadata: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.subspace.m

    @property
    def ansatz(self) -> AdaptiveAnsatz:
        return AdaptiveAnsatz(self.operators, self.theta_star)

    @property
    def eigen_permutation(self) -> list[int]:
        """Subspace index of each energy-sorted eigenpair."""
        return [p.subspace_index for p in self.eigenpairs]

    @property
    def mu_star(self) -> np.ndarray:
        return polar_amplitudes(self.phi_star) ** 2


def state_free_energy(rho: DensityMatrix, H: Observable, beta: float) -> float:
    """``Tr(rho H) - S_vN(rho) / beta``."""
    return expectation(H, rho) - von_neumann_entropy(rho) / beta


def _gibbs_from_matrix(psi: np.ndarray, n_sites: int) -> DensityMatrix:
    rho = psi @ psi.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), n_sites)


def initial_mu_optimization(H: Observable, beta: float, subspace: ComputationalSubspace,
                            cfg: OptimizerConfig = OptimizerConfig()) -> np.ndarray:
    """Angles minimizing ``sum mu_k <c_k|H|c_k> - S(mu) / beta``, started from uniform weights."""
    if subspace.n_sites != H.n_qubits:
        raise ContractViolation("Hamiltonian and subspace widths differ")
    m = subspace.m
    if m == 1:
        return np.zeros(0)
    diag = np.real(np.diag(H.diagonal_part().matrix))[subspace.indices]

    def fg(phi):
        a = polar_amplitudes(phi)
        mu = a * a
        f = float(mu @ diag) - shannon_entropy(mu) / beta
        g = 2.0 * (a * diag) @ polar_jacobian(phi) - entropy_gradient(phi) / beta
        return f, g

    x0 = invert_polar(np.full(m, 1.0 / m))
    try:
        return minimize(fg, x0, cfg).x
    except OptimizerStalled as exc:
        log.warning("initial weight optimization stalled: %s", exc)
        return np.asarray(exc.x, dtype=float)


class _Tracker:
    """Counts objective evaluations and keeps the lowest free energy seen."""

    def __init__(self):
        self.n_evaluations = 0
        self.min_free_energy = math.inf

    def wrap(self, fg):
        def inner(x):
            f, g = fg(x)
            self.n_evaluations += 1
            if f < self.min_free_energy:
                self.min_free_energy = f
            return f, g
        return inner


def run_tepid_adapt(H: Observable, beta_bar: float, subspace: ComputationalSubspace,
                    adapt_cfg: AdaptConfig = AdaptConfig(),
                    opt_cfg: OptimizerConfig = OptimizerConfig()) -> RunResult:
    n = H.n_qubits
    if subspace.n_sites != n:
        raise ContractViolation("Hamiltonian and subspace widths differ")
    if not adapt_cfg.epsilon >= 0:
        raise ContractViolation("epsilon must be non-negative")
    pool = PoolEvaluator(adapt_cfg.resolved_pool(n), n)
    tracker = _Tracker()
    h = H.matrix
    m = subspace.m

    if adapt_cfg.run_initial_mu_opt:
        x = initial_mu_optimization(H, beta_bar, subspace, opt_cfg)
    else:
        x = invert_polar(np.full(m, 1.0 / m))
    operators: list[PauliString] = []
    trace: list[TraceRow] = []
    n_stalls = 0
    converged = True
    while True:
        model = FreeEnergyModel(H, beta_bar, subspace, operators)
        f, _ = tracker.wrap(model.value_and_grad)(x)
        psi = model.state_matrix(x)
        grads = pool.gradients(psi, h @ psi)
        mags = np.abs(grads)
        norm = float(mags.max())
        row = TraceRow(len(operators), f, norm, "", x.size, converged, x.copy())
        trace.append(row)
        log.info("operators=%d F=%.12f |pool grad|=%.3e", len(operators), f, norm)
        if norm <= adapt_cfg.epsilon:
            terminated_by = "pool_tol"
            break
        if len(operators) >= adapt_cfg.max_operators:
            terminated_by = "max_ops"
            break
        pick = int(np.flatnonzero(mags >= norm - TIE_TOL)[0])
        op = pool.words[pick]
        row.chosen = op.letters
        operators.append(op)
        model = FreeEnergyModel(H, beta_bar, subspace, operators)
        x0 = np.append(x, 0.0)
        try:
            res = minimize(tracker.wrap(model.value_and_grad), x0, opt_cfg)
            x, converged = res.x, res.converged
        except OptimizerStalled as exc:
            log.warning("optimizer stalled with %d operators: %s", len(operators), exc)
            n_stalls += 1
            x, converged = np.asarray(exc.x, dtype=float), False

    model = FreeEnergyModel(H, beta_bar, subspace, operators)
    phi, theta = model.split(x)
    psi = model.state_matrix(x)
    result = RunResult(
        hamiltonian=H,
        beta_bar=float(beta_bar),
        subspace=subspace,
        phi_star=phi.copy(),
        theta_star=theta.copy(),
        operators=tuple(operators),
        trace=trace,
        eigenpairs=[],
        gibbs_state=_gibbs_from_matrix(psi, n),
        terminated_by=terminated_by,
        free_energy=trace[-1].free_energy,
        metadata={
            "epsilon": adapt_cfg.epsilon,
            "max_operators": adapt_cfg.max_operators,
            "run_initial_mu_opt": adapt_cfg.run_initial_mu_opt,
            "seed": adapt_cfg.seed,
            "pool_size": len(pool),
            "grad_tol_inf": opt_cfg.grad_tol_inf,
            "operator_order": OPERATOR_ORDER,
            "n_ancilla": n_ancilla_for(m),
            "n_evaluations": tracker.n_evaluations,
            "min_free_energy": tracker.min_free_energy,
            "n_stalls": n_stalls,
        },
    )
    result.eigenpairs = extract_eigenstates(result)
    return result


def _rotated_basis(result: RunResult, subspace: ComputationalSubspace) -> np.ndarray:
    n = result.hamiltonian.n_qubits
    psi = purification_matrix(np.ones(subspace.m), subspace)
    xs, zs, nys = result.ansatz.mask_arrays()
    kernels.apply_rotations(psi, xs, zs, nys, np.ascontiguousarray(result.theta_star, dtype=float))
    if psi.shape[0] != 1 << n:
        raise ContractViolation("subspace width does not match the run")
    return psi


def extract_eigenstates(result: RunResult, subspace: ComputationalSubspace | None = None) -> list[Eigenpair]:
    """``V_A(theta*) |c_k>`` with measured energies, sorted ascending.

    Ties in energy keep the subspace order, so the output is deterministic.
    """
    subspace = subspace or result.subspace
    cols = _rotated_basis(result, subspace)
    hcols = result.hamiltonian.matrix @ cols
    energies = np.einsum("rk,rk->k", cols.conj(), hcols).real
    order = sorted(range(subspace.m), key=lambda k: (energies[k], k))
    n = result.hamiltonian.n_qubits
    return [Eigenpair(float(energies[k]), StateVector(cols[:, k].copy(), n), k) for k in order]


class GapWarning(UserWarning):
    pass


def energy_gaps_from_mu(phi_star, beta_bar: float) -> np.ndarray:
    """``(E_k - E_1) = ln(mu_1 / mu_k) / beta_bar`` in subspace order.

    A vanishing weight yields ``+inf`` and a :class:`GapWarning`.
    """
    mu = polar_amplitudes(phi_star) ** 2
    if mu[0] <= 0:
        raise ContractViolation("mu_1 must be positive")
    gaps = np.full(mu.size, np.inf)
    nz = mu > 0
    gaps[nz] = np.log(mu[0] / mu[nz]) / beta_bar
    if not nz.all():
        warnings.warn(f"zero weights at subspace indices {np.flatnonzero(~nz).tolist()}; gaps set to inf",
                      GapWarning, stacklevel=2)
    return gaps


def _subspace_energies(result: RunResult) -> np.ndarray:
    out = np.empty(result.m)
    for pair in result.eigenpairs or extract_eigenstates(result):
        out[pair.subspace_index] = pair.energy
    return out


def extrapolate_gibbs(result: RunResult, beta: float) -> DensityMatrix:
    """Gibbs state at ``beta >= beta_bar`` reusing the converged adaptive block.

    Weights are re-derived as ``exp(-beta E_k) / Z_m`` from the measured
    eigenstate energies; no angle is re-optimized.
    """
    if beta < result.beta_bar:
        raise ContractViolation(f"beta = {beta} lies below the training value {result.beta_bar}")
    e = _subspace_energies(result)
    w = np.exp(-beta * (e - e.min()))
    mu = w / w.sum()
    phi = invert_polar(mu)
    psi = purification_matrix(polar_amplitudes(phi), result.subspace)
    xs, zs, nys = result.ansatz.mask_arrays()
    kernels.apply_rotations(psi, xs, zs, nys, np.ascontiguousarray(result.theta_star, dtype=float))
    return _gibbs_from_matrix(psi, result.hamiltonian.n_qubits)


@dataclass
class EigenComparison:
    index: int  # position in the energy-sorted list, 0-based
    subspace_index: int
    energy: float
    exact_energy: float
    infidelity: float
    relative_energy_error: float
    flagged: bool


def compare_eigenpairs(result: RunResult, reference: GibbsReference,
                       fidelity_threshold: float = 0.999,
                       energy_rtol: float = 1e-4) -> list[EigenComparison]:
    """Match the k-th extracted state to the k-th exact eigenspace.

    Fidelity is measured against the whole degenerate group of the exact
    k-th eigenvalue; rows missing either threshold are flagged.
    """
    out = []
    for k, pair in enumerate(result.eigenpairs):
        basis = reference.eig.group_basis(k)
        fid = subspace_fidelity(pair.state, basis)
        exact = float(reference.energies[k])
        rel = float(relative_error(pair.energy, exact))
        flagged = fid < fidelity_threshold or rel > energy_rtol
        out.append(EigenComparison(k, pair.subspace_index, pair.energy, exact, 1.0 - fid, rel, flagged))
    return out

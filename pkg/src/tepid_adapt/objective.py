"""Free-energy cost function and its analytic gradients.

For angles ``phi`` (static block) and ``theta`` (adaptive block)

    F(phi, theta) = <Psi| H ⊗ I |Psi> - S(mu(phi)) / beta,

where ``S`` is the Shannon entropy of the polar weights; the adaptive block
acts on the system register only, so the entropy never depends on
``theta``.  Internally the purification is held as a ``(2**n_sites, m)``
matrix whose columns are the ancilla values that can carry weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .ansatz import (
    AdaptiveAnsatz,
    ComputationalSubspace,
    n_ancilla_for,
    polar_amplitudes,
    polar_jacobian,
    purification_matrix,
    system_generator,
)
from .errors import ContractViolation, HermiticityError
from .quantum import Observable, PauliString, StateVector

MU_ZERO = 1e-300
IMAG_TOL = 1e-9


def shannon_entropy(mu) -> float:
    """``-sum mu ln mu`` with ``0 ln 0 = 0``."""
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < -1e-12):
        raise ContractViolation("negative probability in entropy argument")
    nz = mu > MU_ZERO
    return float(-np.sum(mu[nz] * np.log(mu[nz])))


def entropy_gradient(phi) -> np.ndarray:
    """``dS/dphi_l = -2 sum_k a_k (ln mu_k + 1) da_k/dphi_l``."""
    a = polar_amplitudes(phi)
    jac = polar_jacobian(phi)
    mu = a * a
    w = np.zeros_like(a)
    nz = mu > MU_ZERO
    w[nz] = a[nz] * (np.log(mu[nz]) + 1.0)
    return -2.0 * w @ jac


@dataclass
class CostPoint:
    phi: np.ndarray
    ansatz: AdaptiveAnsatz
    hamiltonian: Observable
    beta: float
    subspace: ComputationalSubspace


@dataclass
class GradientVector:
    d_phi: np.ndarray
    d_theta: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.d_phi, self.d_theta])

    @property
    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.as_array()), initial=0.0))


class FreeEnergyModel:
    """Evaluates ``F`` and its gradient over the flat vector ``x = (phi, theta)``.

    The gradient uses one forward pass and one backward (adjoint) pass over
    the generator list, so its cost is linear in the ansatz length.
    """

    def __init__(self, hamiltonian: Observable, beta: float, subspace: ComputationalSubspace,
                 operators: Sequence[PauliString] = ()):
        if hamiltonian.n_qubits != subspace.n_sites:
            raise ContractViolation("Hamiltonian and subspace widths differ")
        if not beta > 0:
            raise ContractViolation(f"beta must be positive, got {beta}")
        self.hamiltonian = hamiltonian
        self.h = np.ascontiguousarray(hamiltonian.matrix)
        self.beta = float(beta)
        self.subspace = subspace
        self.m = subspace.m
        self.n_sites = subspace.n_sites
        ops = tuple(system_generator(p, self.n_sites) for p in operators)
        self.operators = ops
        masks = [p.masks for p in ops]
        self.xs = np.array([q[0] for q in masks], dtype=np.uint64)
        self.zs = np.array([q[1] for q in masks], dtype=np.uint64)
        self.nys = np.array([q[2] for q in masks], dtype=np.intc)
        self._rows = np.array(subspace.indices)
        self._cols = np.arange(self.m)

    @property
    def n_phi(self) -> int:
        return self.m - 1

    @property
    def n_params(self) -> int:
        return self.m - 1 + len(self.operators)

    def split(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        return x[: self.n_phi], x[self.n_phi:]

    def state_matrix(self, x) -> np.ndarray:
        """Rotated purification as a ``(2**n_sites, m)`` matrix."""
        phi, theta = self.split(x)
        psi = purification_matrix(polar_amplitudes(phi), self.subspace)
        kernels.apply_rotations(psi, self.xs, self.zs, self.nys, np.ascontiguousarray(theta))
        return psi

    def energy(self, x) -> float:
        psi = self.state_matrix(x)
        return _real(np.vdot(psi, self.h @ psi))

    def value(self, x) -> float:
        phi, _ = self.split(x)
        mu = polar_amplitudes(phi) ** 2
        return self.energy(x) - shannon_entropy(mu) / self.beta

    def value_and_grad(self, x) -> tuple[float, np.ndarray]:
        phi, theta = self.split(x)
        theta = np.ascontiguousarray(theta)
        a = polar_amplitudes(phi)
        psi = purification_matrix(a, self.subspace)
        kernels.apply_rotations(psi, self.xs, self.zs, self.nys, theta)
        lam = np.ascontiguousarray(self.h @ psi)
        energy = _real(np.vdot(psi, lam))
        mu = a * a
        f = energy - shannon_entropy(mu) / self.beta

        grad_theta = np.zeros(theta.size)
        kernels.adjoint_sweep(psi, lam, self.xs, self.zs, self.nys, theta, grad_theta)
        # lam is now V^dagger H Psi; only entries (c_k, k) meet d Phi / d phi
        overlap = lam[self._rows, self._cols]
        if self.n_phi:
            jac = polar_jacobian(phi)
            grad_phi = 2.0 * (overlap.real @ jac) - entropy_gradient(phi) / self.beta
        else:
            grad_phi = np.zeros(0)
        return f, np.concatenate([grad_phi, grad_theta])

    def purified_state(self, x) -> StateVector:
        """The rotated purification on the full (system ⊗ ancilla) register."""
        psi = self.state_matrix(x)
        n_a = n_ancilla_for(self.m)
        full = np.zeros((1 << self.n_sites, 1 << n_a), dtype=complex)
        full[:, : self.m] = psi
        return StateVector(full.reshape(-1), self.n_sites + n_a)


def _real(z: complex) -> float:
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(z.real)):
        raise HermiticityError(f"energy has imaginary part {z.imag:.3e}")
    return float(z.real)


def _model_for(p: CostPoint) -> tuple[FreeEnergyModel, np.ndarray]:
    model = FreeEnergyModel(p.hamiltonian, p.beta, p.subspace, p.ansatz.operators)
    x = np.concatenate([np.asarray(p.phi, dtype=float).reshape(-1), p.ansatz.theta])
    if x.size != model.n_params:
        raise ContractViolation("phi length does not match the subspace size")
    return model, x


def free_energy(p: CostPoint) -> float:
    model, x = _model_for(p)
    return model.value(x)


def analytic_gradient(p: CostPoint) -> GradientVector:
    model, x = _model_for(p)
    _, g = model.value_and_grad(x)
    return GradientVector(g[: model.n_phi], g[model.n_phi:])


def _walsh_hadamard(v: np.ndarray, n: int) -> np.ndarray:
    """Transform along the last axis: ``out[..., z] = sum_s (-1)**popcount(s & z) v[..., s]``."""
    lead = v.shape[:-1]
    out = v.reshape(lead + (2,) * n).copy()
    for axis in range(len(lead), len(lead) + n):
        a = np.take(out, 0, axis=axis)
        b = np.take(out, 1, axis=axis)
        out = np.stack([a + b, a - b], axis=axis)
    return out.reshape(lead + (1 << n,))


@lru_cache(maxsize=16)
def _phase_table(n: int) -> np.ndarray:
    s = np.arange(1 << n)
    anded = s[:, None] & s[None, :]
    ny = np.zeros_like(anded)
    for bit in range(n):
        ny += (anded >> bit) & 1
    table = (1j) ** (ny % 4)
    table.setflags(write=False)
    return table


def pauli_gradient_table(psi: np.ndarray, hpsi: np.ndarray, n: int) -> np.ndarray:
    """``G[x, z] = -2 Im <H psi| P_{x,z} psi>`` for every Pauli word at once.

    ``P_{x,z}`` has flip mask ``x``, phase mask ``z`` and ``i**popcount(x & z)``
    as prefactor, matching the kernel encoding.
    """
    dim = 1 << n
    mat = psi @ hpsi.conj().T  # <H psi|P psi> = Tr(P mat)
    s = np.arange(dim)
    # shifted[x, s] = mat[s, s ^ x]
    shifted = mat[s[None, :], s[None, :] ^ s[:, None]]
    table = _walsh_hadamard(shifted, n)
    return -2.0 * (_phase_table(n) * table).imag


class PoolEvaluator:
    """Pre-parsed operator pool for repeated gradient screening."""

    def __init__(self, pool: Sequence[PauliString], n_system: int):
        self.words = tuple(system_generator(p, n_system) for p in pool)
        if not self.words:
            raise ContractViolation("operator pool is empty")
        coeffs = np.array([complex(p.coefficient) for p in self.words])
        if np.any(coeffs.imag != 0):
            raise HermiticityError("pool generators must have real coefficients")
        self.coeffs = coeffs.real
        masks = [p.masks for p in self.words]
        self.xs = np.array([q[0] for q in masks], dtype=np.int64)
        self.zs = np.array([q[1] for q in masks], dtype=np.int64)
        self.nys = np.array([q[2] for q in masks], dtype=np.intc)
        self.n_system = n_system

    def __len__(self) -> int:
        return len(self.words)

    def gradients(self, psi: np.ndarray, hpsi: np.ndarray, method: str = "auto") -> np.ndarray:
        """Pool gradients from the state matrix ``psi`` and ``H @ psi`` (rows = system)."""
        n = self.n_system
        if method == "auto":
            method = "table" if len(self) > (1 << n) else "direct"
        if method == "table":
            out = pauli_gradient_table(psi, hpsi, n)[self.xs, self.zs]
        elif method == "direct":
            psi = np.ascontiguousarray(psi, dtype=complex)
            hpsi = np.ascontiguousarray(hpsi, dtype=complex)
            out = np.empty(len(self))
            for i in range(len(self)):
                ov = kernels.pauli_overlap(hpsi, psi, int(self.xs[i]), int(self.zs[i]), int(self.nys[i]))
                out[i] = -2.0 * ov.imag
        else:
            raise ValueError(f"unknown method {method!r}")
        return out * self.coeffs


def pool_gradients(state: StateVector, pool: Sequence[PauliString], H: Observable,
                   method: str = "auto") -> np.ndarray:
    """``dF/dtheta`` at ``theta = 0`` for appending each pool word last.

    Equals ``<Psi| i[H, T] ⊗ I |Psi> = -2 Im <H Psi| T Psi>``; the entropy
    does not contribute.  ``method`` picks per-word overlaps (``"direct"``)
    or a single Walsh-Hadamard table (``"table"``); ``"auto"`` chooses the
    table for large pools.
    """
    n = H.n_qubits
    if state.n_qubits < n:
        raise ContractViolation("state narrower than the Hamiltonian")
    evaluator = PoolEvaluator(pool, n)
    psi = np.ascontiguousarray(state.amplitudes.reshape(1 << n, -1))
    return evaluator.gradients(psi, H.matrix @ psi, method)

"""Static state-preparation block and the adaptive Pauli-exponential block.

The static block prepares the purification

    |Phi(phi)> = sum_k a_k(phi) |c_k> ⊗ |k-1>,   a_k**2 = mu_k,

on (system ⊗ ancilla), where ``a`` are spherical-polar amplitudes of the
``m - 1`` angles ``phi``.  The adaptive block applies
``exp(i theta_k T_k)`` for k = 1 .. N with T_N acting last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ContractViolation
from .quantum import PauliString, StateVector

# Recorded in run metadata: the most recently added generator is the outermost factor.
OPERATOR_ORDER = "new-last"


def n_ancilla_for(m: int) -> int:
    """Minimal ancilla count ``ceil(log2 m)``."""
    if m < 1:
        raise ContractViolation(f"m must be >= 1, got {m}")
    return (m - 1).bit_length()


def polar_amplitudes(phi) -> np.ndarray:
    """Signed amplitudes ``a_j`` whose squares are the weights ``mu_j``."""
    phi = np.asarray(phi, dtype=float).reshape(-1)
    m = phi.size + 1
    a = np.empty(m)
    s = 1.0
    for j in range(m - 1):
        a[j] = s * math.cos(phi[j])
        s *= math.sin(phi[j])
    a[m - 1] = s
    return a


def polar_to_mu(phi) -> np.ndarray:
    return polar_amplitudes(phi) ** 2


def polar_jacobian(phi) -> np.ndarray:
    """``J[j, l] = d a_j / d phi_l`` as an ``(m, m-1)`` array.

    Obtained by differentiating :func:`polar_amplitudes` term by term.
    """
    phi = np.asarray(phi, dtype=float).reshape(-1)
    m = phi.size + 1
    s = np.sin(phi)
    c = np.cos(phi)
    jac = np.zeros((m, m - 1))
    for j in range(m):
        last = m - 1 if j == m - 1 else j  # sines multiplying a_j: phi_0 .. phi_{last-1}
        for l in range(min(j + 1, m - 1)):
            if l < last:
                val = c[l] * np.prod(s[:l]) * np.prod(s[l + 1:last])
                if j < m - 1:
                    val *= c[j]
            else:  # l == j < m - 1
                val = -np.prod(s[:j]) * s[j]
            jac[j, l] = val
    return jac


def invert_polar(mu) -> np.ndarray:
    """Angles in ``[0, pi/2]`` reproducing the simplex vector ``mu``."""
    mu = np.asarray(mu, dtype=float).reshape(-1)
    if np.any(mu < -1e-12) or abs(mu.sum() - 1.0) > 1e-10:
        raise ContractViolation("mu must be a probability vector")
    mu = np.clip(mu, 0.0, None)
    tails = np.cumsum(mu[::-1])[::-1]  # tails[j] = sum_{k >= j} mu_k
    phi = np.empty(mu.size - 1)
    for j in range(mu.size - 1):
        phi[j] = math.atan2(math.sqrt(tails[j + 1]), math.sqrt(mu[j]))
    return phi


def givens(k: int, phi_k: float, dim: int) -> np.ndarray:
    """``exp(i phi gamma^{(k,k+1)})`` on a ``dim``-level register (``k`` is 1-based)."""
    if not 1 <= k < dim:
        raise ContractViolation(f"Givens index {k} out of range for dimension {dim}")
    g = np.eye(dim, dtype=complex)
    c, s = math.cos(phi_k), math.sin(phi_k)
    g[k - 1, k - 1] = g[k, k] = c
    g[k, k - 1] = s
    g[k - 1, k] = -s
    return g


def apply_givens_sequence(phi, vec: np.ndarray) -> np.ndarray:
    """Apply G^{(1,2)}(phi_1) first, then G^{(2,3)}(phi_2), and so on, to the levels of ``vec``."""
    out = np.array(vec, dtype=complex)
    for k, p in enumerate(np.asarray(phi, dtype=float).reshape(-1)):
        c, s = math.cos(p), math.sin(p)
        lo, hi = out[k], out[k + 1]
        out[k], out[k + 1] = c * lo - s * hi, s * lo + c * hi
    return out


def prepare_ancilla_state(phi, n_ancilla: int) -> StateVector:
    """``sum_k a_k |k-1>`` on the ancilla register, built from Givens rotations."""
    m = np.asarray(phi).size + 1
    if n_ancilla < n_ancilla_for(m):
        raise ContractViolation(f"{n_ancilla} ancillas cannot hold {m} levels")
    vec = np.zeros(1 << n_ancilla, dtype=complex)
    vec[0] = 1.0
    return StateVector(apply_givens_sequence(phi, vec), n_ancilla)


@dataclass(frozen=True)
class ComputationalSubspace:
    """Ordered, distinct computational basis labels ``c_1 .. c_m``."""

    elements: tuple[str, ...]

    def __post_init__(self):
        elements = tuple(str(e) for e in self.elements)
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise ContractViolation("subspace is empty")
        width = len(elements[0])
        for e in elements:
            if len(e) != width or set(e) - {"0", "1"}:
                raise ContractViolation(f"bad basis label {e!r}")
        if len(set(elements)) != len(elements):
            raise ContractViolation("subspace labels must be distinct")

    @property
    def m(self) -> int:
        return len(self.elements)

    @property
    def n_sites(self) -> int:
        return len(self.elements[0])

    @property
    def indices(self) -> list[int]:
        return [int(e, 2) for e in self.elements]

    def head(self, m: int) -> "ComputationalSubspace":
        if not 1 <= m <= self.m:
            raise ContractViolation(f"cannot take {m} of {self.m} subspace elements")
        return ComputationalSubspace(self.elements[:m])

    def __len__(self) -> int:
        return self.m


def purification_matrix(amplitudes: np.ndarray, subspace: ComputationalSubspace,
                        n_cols: int | None = None) -> np.ndarray:
    """The purification reshaped to ``(2**n_sites, n_cols)``; column k holds ancilla ``|k>``."""
    m = subspace.m
    n_cols = m if n_cols is None else n_cols
    psi = np.zeros((1 << subspace.n_sites, n_cols), dtype=complex)
    psi[subspace.indices, np.arange(m)] = amplitudes
    return psi


def prepare_purification(phi, subspace: ComputationalSubspace) -> StateVector:
    phi = np.asarray(phi, dtype=float).reshape(-1)
    if phi.size + 1 != subspace.m:
        raise ContractViolation(f"{phi.size} angles do not match a subspace of size {subspace.m}")
    n_a = n_ancilla_for(subspace.m)
    psi = purification_matrix(polar_amplitudes(phi), subspace, 1 << n_a)
    return StateVector(psi.reshape(-1), subspace.n_sites + n_a)


@dataclass(frozen=True)
class AdaptiveAnsatz:
    """Immutable list of system-register generators and their angles."""

    operators: tuple[PauliString, ...] = ()
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).reshape(-1)
        theta.setflags(write=False)
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "theta", theta)
        if len(self.operators) != theta.size:
            raise ContractViolation("one angle per generator is required")
        widths = {p.n_qubits for p in self.operators}
        if len(widths) > 1:
            raise ContractViolation("generators have mixed widths")

    def __len__(self) -> int:
        return len(self.operators)

    def append(self, op: PauliString, theta: float = 0.0) -> "AdaptiveAnsatz":
        return AdaptiveAnsatz(self.operators + (op,), np.append(self.theta, theta))

    def with_theta(self, theta) -> "AdaptiveAnsatz":
        return AdaptiveAnsatz(self.operators, theta)

    def truncated(self, n: int) -> "AdaptiveAnsatz":
        return AdaptiveAnsatz(self.operators[:n], self.theta[:n])

    def mask_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        masks = [p.masks for p in self.operators]
        xs = np.array([m[0] for m in masks], dtype=np.uint64)
        zs = np.array([m[1] for m in masks], dtype=np.uint64)
        nys = np.array([m[2] for m in masks], dtype=np.intc)
        return xs, zs, nys


def system_generator(op: PauliString, n_system: int) -> PauliString:
    """Restrict ``op`` to the system register, rejecting any ancilla support."""
    if op.n_qubits == n_system:
        return op
    if op.n_qubits > n_system and set(op.letters[n_system:]) <= {"I"}:
        return PauliString(op.letters[:n_system], op.coefficient)
    raise ContractViolation(f"generator {op.letters} acts outside the {n_system}-qubit system register")


def apply_adaptive(ansatz: AdaptiveAnsatz, state: StateVector, n_system: int | None = None) -> StateVector:
    """``(V_A(theta) ⊗ I) |state>``; the input is left untouched."""
    if not ansatz.operators:
        return StateVector(state.amplitudes.copy(), state.n_qubits)
    n_system = ansatz.operators[0].n_qubits if n_system is None else n_system
    if n_system > state.n_qubits:
        raise ContractViolation("system register wider than the state")
    ops = [system_generator(p, n_system) for p in ansatz.operators]
    if any(p.coefficient != 1 for p in ops):
        raise ContractViolation("generators must carry unit coefficient")
    restricted = AdaptiveAnsatz(tuple(ops), ansatz.theta)
    xs, zs, nys = restricted.mask_arrays()
    psi = np.ascontiguousarray(
        state.amplitudes.reshape(1 << n_system, 1 << (state.n_qubits - n_system)).copy()
    )
    kernels.apply_rotations(psi, xs, zs, nys, np.ascontiguousarray(ansatz.theta))
    return StateVector(psi.reshape(-1), state.n_qubits)


def adaptive_unitary(ansatz: AdaptiveAnsatz, n_system: int) -> np.ndarray:
    """Dense ``V_A(theta)`` on the system register (columns are images of basis states)."""
    eye = np.eye(1 << n_system, dtype=complex)
    if not ansatz.operators:
        return eye
    xs, zs, nys = ansatz.mask_arrays()
    kernels.apply_rotations(eye, xs, zs, nys, np.ascontiguousarray(ansatz.theta))
    return eye


def subspace_from_ints(values: Sequence[int], n_sites: int) -> ComputationalSubspace:
    return ComputationalSubspace(tuple(format(v, f"0{n_sites}b") for v in values))

"""Dense multi-qubit linear algebra: Pauli words, states, partial traces, fidelities.

Conventions
-----------
Qubit 0 is the leftmost label of a ket, i.e. the most significant bit of the
basis index: ``|q0 q1 ... q_{n-1}>`` has index ``sum_q b_q 2**(n-1-q)``.
A combined register is ordered (system ⊗ ancilla), so a purified state
reshaped to ``(2**n_system, 2**n_ancilla)`` has the system index on rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from ._pykernels import pauli_action
from .errors import ContractViolation, HermiticityError, PSDViolationError, ResourceError

PAULI_LETTERS = "IXYZ"
MAX_DENSE_QUBITS = 15
GROUP_TOL = 1e-8
PSD_TOL = 1e-10
IMAG_TOL = 1e-10

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """A signed Pauli word such as ``"XIZY"`` with a complex prefactor."""

    letters: str
    coefficient: complex = 1.0

    def __post_init__(self):
        if not self.letters or any(c not in PAULI_LETTERS for c in self.letters):
            raise ContractViolation(f"invalid Pauli word {self.letters!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @cached_property
    def masks(self) -> tuple[int, int, int]:
        """``(x_mask, z_mask, n_y)`` in the kernel encoding."""
        n = len(self.letters)
        x = z = ny = 0
        for q, c in enumerate(self.letters):
            bit = 1 << (n - 1 - q)
            if c in "XY":
                x |= bit
            if c in "YZ":
                z |= bit
            if c == "Y":
                ny += 1
        return x, z, ny

    @property
    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def to_matrix(self) -> np.ndarray:
        out = np.array([[self.coefficient]], dtype=complex)
        for c in self.letters:
            out = np.kron(out, _PAULI_MATRICES[c])
        return out

    def __str__(self) -> str:
        if self.coefficient == 1:
            return self.letters
        return f"({self.coefficient}){self.letters}"


def pauli_pool(n_qubits: int, include_identity: bool = True) -> list[PauliString]:
    """All ``4**n_qubits`` Pauli words, lexicographically ordered (I < X < Y < Z)."""
    words = ("".join(w) for w in itertools.product(PAULI_LETTERS, repeat=n_qubits))
    pool = [PauliString(w) for w in words]
    if not include_identity:
        pool = [p for p in pool if not p.is_identity]
    return pool


@dataclass(frozen=True)
class Observable:
    """A real-weighted sum of Pauli words.

    Build with :meth:`from_terms`, which merges duplicate words and drops
    zero weights.
    """

    terms: tuple[tuple[float, str], ...]
    n_qubits: int

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, str | PauliString]], n_qubits: int | None = None):
        merged: dict[str, float] = {}
        for weight, word in terms:
            if isinstance(word, PauliString):
                coeff = complex(word.coefficient) * weight
                if abs(coeff.imag) > 0:
                    raise ContractViolation("observable weights must be real")
                weight, word = coeff.real, word.letters
            PauliString(word)
            merged[word] = merged.get(word, 0.0) + float(weight)
        widths = {len(w) for w in merged}
        if n_qubits is None:
            if len(widths) != 1:
                raise ContractViolation("cannot infer register width from terms")
            n_qubits = widths.pop()
        elif widths - {n_qubits}:
            raise ContractViolation("term widths do not match n_qubits")
        kept = tuple((w, word) for word, w in sorted(merged.items()) if w != 0.0)
        return cls(kept, n_qubits)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense matrix, built once and cached."""
        if self.n_qubits > MAX_DENSE_QUBITS:
            raise ResourceError(f"{self.n_qubits} qubits exceeds the dense cap of {MAX_DENSE_QUBITS}")
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        rows = np.arange(dim)
        for weight, word in self.terms:
            x, z, ny = PauliString(word).masks
            # row r of P picks column r ^ x
            perm, sign = pauli_action(dim, x, z)
            out[rows, perm] += weight * (1j**ny) * sign
        out.setflags(write=False)
        return out

    @cached_property
    def is_real(self) -> bool:
        """True when every word has an even number of Y letters."""
        return all(word.count("Y") % 2 == 0 for _, word in self.terms)

    def diagonal_part(self) -> "Observable":
        """Keep only words made of I and Z."""
        return Observable(tuple(t for t in self.terms if set(t[1]) <= {"I", "Z"}), self.n_qubits)

    def off_diagonal_part(self) -> "Observable":
        return Observable(tuple(t for t in self.terms if not set(t[1]) <= {"I", "Z"}), self.n_qubits)

    def __len__(self) -> int:
        return len(self.terms)


@dataclass
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.shape[0] != 1 << self.n_qubits:
            raise ContractViolation(
                f"{self.amplitudes.shape[0]} amplitudes do not fit {self.n_qubits} qubits"
            )

    @classmethod
    def basis(cls, label: str) -> "StateVector":
        """Computational basis state from a bitstring label such as ``"0101"``."""
        amps = np.zeros(1 << len(label), dtype=complex)
        amps[int(label, 2)] = 1.0
        return cls(amps, len(label))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density_matrix(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), self.n_qubits)


@dataclass
class DensityMatrix:
    entries: np.ndarray
    n_qubits: int

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        dim = 1 << self.n_qubits
        if self.entries.shape != (dim, dim):
            raise ContractViolation(f"density matrix shape {self.entries.shape} does not fit {self.n_qubits} qubits")

    def check(self, tol: float = 1e-12) -> None:
        """Raise if the matrix is not Hermitian, unit-trace and PSD."""
        rho = self.entries
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol:
            raise ContractViolation("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > tol:
            raise ContractViolation("density matrix trace differs from 1")
        if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise PSDViolationError("density matrix has a negative eigenvalue")

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass
class EigenSystem:
    energies: np.ndarray
    vectors: np.ndarray
    degeneracy_groups: list[list[int]] = field(default_factory=list)
    group_tol: float = GROUP_TOL

    def group_of(self, index: int) -> list[int]:
        for g in self.degeneracy_groups:
            if index in g:
                return g
        raise IndexError(index)

    def state(self, index: int) -> StateVector:
        n = int(np.log2(self.vectors.shape[0]))
        return StateVector(self.vectors[:, index], n)

    def group_basis(self, index: int) -> list[StateVector]:
        return [self.state(j) for j in self.group_of(index)]


def degeneracy_groups(energies: Sequence[float], tol: float = GROUP_TOL) -> list[list[int]]:
    """Partition sorted energies so every group spans at most ``tol``."""
    groups: list[list[int]] = []
    start = None
    for i, e in enumerate(energies):
        if start is None or e - energies[start] > tol:
            groups.append([i])
            start = i
        else:
            groups[-1].append(i)
    return groups


def _as_matrix(v: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(v.reshape(v.shape[0], -1), dtype=complex)


def apply_pauli(p: PauliString, v: StateVector) -> StateVector:
    """Matrix-free ``p |v>``; the input is left untouched."""
    if p.n_qubits != v.n_qubits:
        raise ContractViolation(f"Pauli width {p.n_qubits} does not match state width {v.n_qubits}")
    x, z, ny = p.masks
    out = kernels.apply_pauli(_as_matrix(v.amplitudes), x, z, ny).reshape(-1)
    return StateVector(p.coefficient * out, v.n_qubits)


def expectation(obs: Observable, state: StateVector | DensityMatrix) -> float:
    """``Tr(rho obs)`` for a pure or mixed state."""
    if state.n_qubits != obs.n_qubits:
        raise ContractViolation("observable and state widths differ")
    h = obs.matrix
    if isinstance(state, StateVector):
        a = state.amplitudes
        val = np.vdot(a, h @ a)
    else:
        val = np.einsum("ij,ji->", h, state.entries)
    if abs(val.imag) > IMAG_TOL:
        raise HermiticityError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def partial_trace_ancilla(v: StateVector, n_system: int, n_ancilla: int) -> DensityMatrix:
    """Reduced state of the leading ``n_system`` qubits."""
    if v.n_qubits != n_system + n_ancilla:
        raise ContractViolation(
            f"state has {v.n_qubits} qubits, expected {n_system} + {n_ancilla}"
        )
    psi = v.amplitudes.reshape(1 << n_system, 1 << n_ancilla)
    rho = psi @ psi.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), n_system)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-Tr(rho ln rho)`` from the spectrum; clipped eigenvalues contribute zero."""
    w = np.linalg.eigvalsh(rho.entries)
    if w.min() < -PSD_TOL:
        raise PSDViolationError(f"eigenvalue {w.min():.3e} below -{PSD_TOL}")
    w = w[w > 1e-300]
    return float(-np.sum(w * np.log(w)))


def eigensystem(obs: Observable, group_tol: float = GROUP_TOL) -> EigenSystem:
    """Full dense spectrum, sorted ascending, with degeneracy groups."""
    if obs.n_qubits > MAX_DENSE_QUBITS:
        raise ResourceError(f"{obs.n_qubits} qubits exceeds the dense cap of {MAX_DENSE_QUBITS}")
    h = obs.matrix
    if obs.is_real:
        energies, vecs = np.linalg.eigh(h.real)
        vecs = vecs.astype(complex)
    else:
        energies, vecs = np.linalg.eigh(h)
    return EigenSystem(energies, vecs, degeneracy_groups(energies, group_tol), group_tol)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(rho)
    if w.min() < -PSD_TOL:
        raise PSDViolationError(f"eigenvalue {w.min():.3e} below -{PSD_TOL}")
    # eigenvalues at roundoff level are zeros of a rank-deficient state; their
    # square roots would otherwise inject ~1e-8 noise
    cutoff = w.size * np.finfo(float).eps * max(float(w.max()), 0.0)
    w = np.where(w > cutoff, np.sqrt(np.clip(w, 0.0, None)), 0.0)
    return (u * w) @ u.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2`` in [0, 1].

    Evaluated as the squared nuclear norm of ``sqrt(rho) sqrt(sigma)``.
    """
    if rho.n_qubits != sigma.n_qubits:
        raise ContractViolation("fidelity between states of different width")
    sv = np.linalg.svd(_psd_sqrt(rho.entries) @ _psd_sqrt(sigma.entries), compute_uv=False)
    f = float(sv.sum() ** 2)
    return min(max(f, 0.0), 1.0)


def pure_fidelity(psi: StateVector, phi: StateVector) -> float:
    if psi.n_qubits != phi.n_qubits:
        raise ContractViolation("fidelity between states of different width")
    return min(float(abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2), 1.0)


def subspace_fidelity(psi: StateVector, basis: Sequence[StateVector], tol: float = 1e-10) -> float:
    """Weight of ``psi`` inside the span of an orthonormal ``basis``."""
    if not basis:
        raise ContractViolation("empty basis")
    b = np.column_stack([v.amplitudes for v in basis])
    if b.shape[0] != psi.amplitudes.shape[0]:
        raise ContractViolation("basis and state widths differ")
    gram = b.conj().T @ b
    if np.max(np.abs(gram - np.eye(b.shape[1]))) > tol:
        raise ContractViolation("basis is not orthonormal")
    overlaps = b.conj().T @ psi.amplitudes
    return min(float(np.sum(np.abs(overlaps) ** 2)), 1.0)

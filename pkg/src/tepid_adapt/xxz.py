"""Heisenberg XXZ chain and exact-diagonalization Gibbs references."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import ContractViolation, DegeneracySplitError, ResourceError
from .quantum import (
    GROUP_TOL,
    MAX_DENSE_QUBITS,
    DensityMatrix,
    EigenSystem,
    Observable,
    degeneracy_groups,
    eigensystem,
)

TRUNCATION_MODES = ("strict", "split", "ordered")


@dataclass(frozen=True)
class XXZConfig:
    """Open chain ``sum_k X_k X_{k+1} + Y_k Y_{k+1} + j_z Z_k Z_{k+1}``."""

    n_sites: int
    j_z: float

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ContractViolation(f"n_sites must be an integer >= 2, got {self.n_sites}")

    @property
    def phase(self) -> str:
        if self.j_z < -1:
            return "ferromagnetic"
        if self.j_z > 1:
            return "antiferromagnetic"
        if -1 < self.j_z < 1:
            return "paramagnetic"
        return "critical"


# Boundary convention recorded alongside run outputs.
BOUNDARY = "open: bonds k = 1 .. n_sites - 1"


def build_xxz(cfg: XXZConfig) -> Observable:
    n = cfg.n_sites
    terms = []
    for k in range(n - 1):
        for letter, weight in (("X", 1.0), ("Y", 1.0), ("Z", cfg.j_z)):
            word = ["I"] * n
            word[k] = word[k + 1] = letter
            terms.append((weight, "".join(word)))
    return Observable.from_terms(terms, n)


def _boltzmann(energies: np.ndarray, beta: float) -> np.ndarray:
    """Unnormalized weights ``exp(-beta (E - E_min))``."""
    return np.exp(-beta * (energies - energies.min()))


def free_energy_from_spectrum(energies, beta: float) -> float:
    """``-ln(Z) / beta`` evaluated with the ground energy shifted out."""
    e = np.asarray(energies, dtype=float)
    return float(e.min() - math.log(_boltzmann(e, beta).sum()) / beta)


def free_energy_of_weights(energies, weights, beta: float) -> float:
    """``sum p E + beta^-1 sum p ln p`` for a diagonal state."""
    e = np.asarray(energies, dtype=float)
    p = np.asarray(weights, dtype=float)
    nz = p > 1e-300
    return float(np.dot(p, e) + np.sum(p[nz] * np.log(p[nz])) / beta)


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise ContractViolation(f"beta must be positive, got {beta}")


def gibbs_exact(H: Observable, beta: float, eig: EigenSystem | None = None) -> DensityMatrix:
    _check_beta(beta)
    eig = eig or eigensystem(H)
    w = _boltzmann(eig.energies, beta)
    w /= w.sum()
    v = eig.vectors
    rho = (v * w) @ v.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), H.n_qubits)


def truncated_weights(energies, beta: float, m: int, mode: str = "strict",
                      group_tol: float = GROUP_TOL) -> np.ndarray:
    """Normalized weights over the sorted spectrum for an ``m``-truncation.

    ``strict`` refuses to cut a degenerate level, ``split`` spreads the cut
    level's share uniformly over all its members and ``ordered`` keeps the
    first ``m`` states as listed.
    """
    e = np.asarray(energies, dtype=float)
    n = len(e)
    if not 1 <= m <= n:
        raise ContractViolation(f"m must lie in [1, {n}], got {m}")
    if mode not in TRUNCATION_MODES:
        raise ContractViolation(f"unknown truncation mode {mode!r}")
    w = _boltzmann(e, beta)
    keep = np.zeros(n)
    keep[:m] = 1.0
    if mode != "ordered":
        for g in degeneracy_groups(e, group_tol):
            inside = sum(1 for i in g if i < m)
            if 0 < inside < len(g):
                if mode == "strict":
                    raise DegeneracySplitError(
                        f"m = {m} cuts the degenerate level at E = {e[g[0]]:.10g} "
                        f"({inside} of {len(g)} states)"
                    )
                keep[g] = inside / len(g)
    p = w * keep
    return p / p.sum()


def gibbs_truncated(H: Observable, beta: float, m: int, mode: str = "strict",
                    eig: EigenSystem | None = None) -> tuple[DensityMatrix, float]:
    """Truncated Gibbs state on the lowest ``m`` eigenvectors and its free energy."""
    _check_beta(beta)
    eig = eig or eigensystem(H)
    p = truncated_weights(eig.energies, beta, m, mode, eig.group_tol)
    v = eig.vectors
    rho = (v * p) @ v.conj().T
    floor = free_energy_of_weights(eig.energies, p, beta)
    return DensityMatrix(0.5 * (rho + rho.conj().T), H.n_qubits), floor


class RelativeError(float):
    """A float that remembers whether it fell back to an absolute error."""

    absolute: bool = False

    def __new__(cls, value: float, absolute: bool = False):
        obj = super().__new__(cls, value)
        obj.absolute = absolute
        return obj


def relative_error(q: float, q_exact: float) -> RelativeError:
    """``|(q - q_exact) / q_exact|``; falls back to ``|q|`` when ``q_exact == 0``."""
    if q_exact == 0:
        return RelativeError(abs(q), absolute=True)
    return RelativeError(abs((q - q_exact) / q_exact))


@dataclass
class GibbsReference:
    """Exact-diagonalization oracle for one Hamiltonian at one temperature."""

    hamiltonian: Observable
    beta: float
    eig: EigenSystem = field(repr=False, default=None)

    def __post_init__(self):
        _check_beta(self.beta)
        if self.eig is None:
            self.eig = eigensystem(self.hamiltonian)

    @property
    def energies(self) -> np.ndarray:
        return self.eig.energies

    @property
    def exact_state(self) -> DensityMatrix:
        return gibbs_exact(self.hamiltonian, self.beta, self.eig)

    @property
    def free_energy_exact(self) -> float:
        return free_energy_from_spectrum(self.eig.energies, self.beta)

    def truncated_state(self, m: int, mode: str = "strict") -> DensityMatrix:
        return gibbs_truncated(self.hamiltonian, self.beta, m, mode, self.eig)[0]

    def free_energy_floor(self, m: int, mode: str = "ordered") -> float:
        """Lowest free energy reachable by a rank-``m`` state.

        The default ``ordered`` mode is well defined even when ``m`` cuts a
        degenerate level because the value does not depend on which members
        are kept.
        """
        p = truncated_weights(self.eig.energies, self.beta, m, mode, self.eig.group_tol)
        return free_energy_of_weights(self.eig.energies, p, self.beta)

    def floor_relative_error(self, m: int) -> float:
        return float(relative_error(self.free_energy_floor(m), self.free_energy_exact))

    def index_set_floor(self, indices) -> float:
        """Free energy of the Gibbs state restricted to the given eigenstates."""
        e = self.eig.energies[list(indices)]
        return free_energy_from_spectrum(e, self.beta)


@lru_cache(maxsize=64)
def xxz_reference(n_sites: int, j_z: float, beta: float) -> GibbsReference:
    """Memoized oracle; callers must treat the result as read-only."""
    return GibbsReference(build_xxz(XXZConfig(n_sites, j_z)), beta)


def xxz_sector_energies(cfg: XXZConfig, max_sites: int = MAX_DENSE_QUBITS) -> np.ndarray:
    """Full XXZ spectrum assembled from fixed-magnetization blocks.

    The chain conserves the number of up spins, so each block is
    diagonalized separately; only eigenvalues are returned, sorted.
    """
    n = cfg.n_sites
    if n > max_sites:
        raise ResourceError(f"{n} sites exceeds the cap of {max_sites}")
    out = []
    for ups in range(n + 1):
        states = [sum(1 << b for b in c) for c in combinations(range(n), ups)]
        index = {s: i for i, s in enumerate(states)}
        dim = len(states)
        h = np.zeros((dim, dim))
        for i, s in enumerate(states):
            diag = 0.0
            for k in range(n - 1):
                b1 = (s >> k) & 1
                b2 = (s >> (k + 1)) & 1
                diag += cfg.j_z * (1.0 if b1 == b2 else -1.0)
                if b1 != b2:
                    # XX + YY swaps an antiparallel pair with amplitude 2
                    h[index[s ^ (0b11 << k)], i] += 2.0
            h[i, i] = diag
        out.append(np.linalg.eigvalsh(h))
    return np.sort(np.concatenate(out))

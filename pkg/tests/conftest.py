from __future__ import annotations

import time

import numpy as np
import pytest

from tepid_adapt.ansatz import ComputationalSubspace
from tepid_adapt.config import PHASE_SUBSPACES
from tepid_adapt.driver import AdaptConfig, run_tepid_adapt
from tepid_adapt.quantum import Observable, PauliString
from tepid_adapt.xxz import xxz_reference

BETA_BAR = 3.0
PHASE_JZ = {"ferromagnetic": -1.5, "paramagnetic": 0.0, "antiferromagnetic": 1.5}

_RUNS: dict = {}


def adaptive_run(phase: str, m: int, seed: int = 0):
    """Cached full run on the six-site chain; returns (result, reference, seconds)."""
    key = (phase, m, seed)
    if key not in _RUNS:
        ref = xxz_reference(6, PHASE_JZ[phase], BETA_BAR)
        sub = ComputationalSubspace(PHASE_SUBSPACES[phase][:m])
        t0 = time.perf_counter()
        result = run_tepid_adapt(ref.hamiltonian, BETA_BAR, sub, AdaptConfig(epsilon=1e-6, seed=seed))
        _RUNS[key] = (result, ref, time.perf_counter() - t0)
    return _RUNS[key]


@pytest.fixture(scope="session")
def antiferro_runs():
    return {m: adaptive_run("antiferromagnetic", m) for m in (2, 3, 4)}


@pytest.fixture(scope="session")
def para_m4():
    return adaptive_run("paramagnetic", 4)


def kron_pauli(word: str) -> np.ndarray:
    """Independent dense oracle built from Kronecker products."""
    mats = {
        "I": np.eye(2),
        "X": np.array([[0, 1], [1, 0]]),
        "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.diag([1.0, -1.0]),
    }
    out = np.array([[1.0 + 0j]])
    for letter in word:
        out = np.kron(out, mats[letter])
    return out


def random_word(rng, n: int, allow_identity: bool = True) -> str:
    while True:
        word = "".join(rng.choice(list("IXYZ"), size=n))
        if allow_identity or set(word) != {"I"}:
            return word


def random_observable(rng, n: int, n_terms: int = 6) -> Observable:
    terms = [(float(rng.normal()), random_word(rng, n, allow_identity=False)) for _ in range(n_terms)]
    return Observable.from_terms(terms, n)


def random_subspace(rng, n: int, m: int) -> ComputationalSubspace:
    picks = rng.choice(1 << n, size=m, replace=False)
    return ComputationalSubspace(tuple(format(int(v), f"0{n}b") for v in picks))


def random_generators(rng, n: int, length: int) -> list[PauliString]:
    return [PauliString(random_word(rng, n, allow_identity=False)) for _ in range(length)]

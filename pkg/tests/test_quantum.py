from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import kron_pauli, random_observable
from tepid_adapt.errors import ContractViolation, HermiticityError, ResourceError
from tepid_adapt.quantum import (
    DensityMatrix,
    Observable,
    PauliString,
    StateVector,
    apply_pauli,
    degeneracy_groups,
    eigensystem,
    expectation,
    fidelity,
    partial_trace_ancilla,
    pauli_pool,
    pure_fidelity,
    subspace_fidelity,
    von_neumann_entropy,
)

words = st.text(alphabet="IXYZ", min_size=1, max_size=4)


@given(words)
def test_pauli_matrix_matches_kronecker_products(word):
    np.testing.assert_allclose(PauliString(word).to_matrix(), kron_pauli(word), atol=0)


@given(words, st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_apply_pauli_matches_dense(word, seed):
    rng = np.random.default_rng(seed)
    n = len(word)
    v = StateVector(rng.normal(size=2**n) + 1j * rng.normal(size=2**n), n)
    out = apply_pauli(PauliString(word), v)
    np.testing.assert_allclose(out.amplitudes, kron_pauli(word) @ v.amplitudes, atol=1e-14)


def test_invalid_word_rejected():
    with pytest.raises(ContractViolation):
        PauliString("XAZ")
    with pytest.raises(ContractViolation):
        PauliString("")


def test_pool_is_lexicographic_and_complete():
    pool = pauli_pool(2)
    assert [p.letters for p in pool][:5] == ["II", "IX", "IY", "IZ", "XI"]
    assert len(pool) == 16
    assert len(pauli_pool(3, include_identity=False)) == 63


def test_observable_matrix_matches_kronecker_sum():
    rng = np.random.default_rng(3)
    obs = random_observable(rng, 3, 8)
    dense = sum(w * kron_pauli(word) for w, word in obs.terms)
    np.testing.assert_allclose(obs.matrix, dense, atol=1e-14)


def test_observable_merges_duplicates_and_drops_zeros():
    obs = Observable.from_terms([(1.0, "XZ"), (0.5, "XZ"), (2.0, "ZZ"), (-2.0, "ZZ")])
    assert obs.terms == ((1.5, "XZ"),)


def test_observable_cap():
    obs = Observable.from_terms([(1.0, "Z" * 16)])
    with pytest.raises(ResourceError):
        obs.matrix
    with pytest.raises(ResourceError):
        eigensystem(obs)


def test_diagonal_split():
    obs = Observable.from_terms([(1.0, "ZZ"), (2.0, "XX"), (3.0, "IZ")])
    assert obs.diagonal_part().terms == ((3.0, "IZ"), (1.0, "ZZ"))
    assert obs.off_diagonal_part().terms == ((2.0, "XX"),)


def test_expectation_pure_and_mixed_agree():
    rng = np.random.default_rng(1)
    obs = random_observable(rng, 3)
    a = rng.normal(size=8) + 1j * rng.normal(size=8)
    v = StateVector(a / np.linalg.norm(a), 3)
    assert expectation(obs, v) == pytest.approx(expectation(obs, v.density_matrix()), abs=1e-13)


def test_expectation_rejects_imaginary_value():
    # a non-Hermitian "density matrix" gives <Y> = i
    rho = DensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]]), 1)
    with pytest.raises(HermiticityError):
        expectation(Observable(((1.0, "Y"),), 1), rho)


def test_partial_trace_of_product_state():
    sys_vec = np.array([0.6, 0.8j])
    anc = np.array([1.0, 0.0])
    v = StateVector(np.kron(sys_vec, anc), 2)
    rho = partial_trace_ancilla(v, 1, 1)
    np.testing.assert_allclose(rho.entries, np.outer(sys_vec, sys_vec.conj()), atol=1e-15)
    rho.check()


def test_bell_state_entropy_is_ln2():
    v = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2), 2)
    assert von_neumann_entropy(partial_trace_ancilla(v, 1, 1)) == pytest.approx(np.log(2), abs=1e-14)


def test_fidelity_of_commuting_states():
    p = np.array([0.5, 0.3, 0.2, 0.0])
    q = np.array([0.25, 0.25, 0.25, 0.25])
    f = fidelity(DensityMatrix(np.diag(p), 2), DensityMatrix(np.diag(q), 2))
    assert f == pytest.approx(np.sum(np.sqrt(p * q)) ** 2, abs=1e-14)


def test_fidelity_pure_limit_and_symmetry():
    rng = np.random.default_rng(4)
    a = rng.normal(size=4) + 1j * rng.normal(size=4)
    b = rng.normal(size=4) + 1j * rng.normal(size=4)
    va = StateVector(a / np.linalg.norm(a), 2)
    vb = StateVector(b / np.linalg.norm(b), 2)
    f = fidelity(va.density_matrix(), vb.density_matrix())
    assert f == pytest.approx(pure_fidelity(va, vb), abs=1e-12)
    assert f == pytest.approx(fidelity(vb.density_matrix(), va.density_matrix()), abs=1e-12)
    assert fidelity(va.density_matrix(), va.density_matrix()) == pytest.approx(1.0, abs=1e-12)


def test_subspace_fidelity_sums_overlaps():
    basis = [StateVector.basis("00"), StateVector.basis("01")]
    v = StateVector(np.array([0.6, 0.0, 0.8, 0.0]), 2)
    assert subspace_fidelity(v, basis) == pytest.approx(0.36)
    with pytest.raises(ContractViolation):
        subspace_fidelity(v, [StateVector.basis("00"), StateVector.basis("00")])


def test_degeneracy_groups():
    assert degeneracy_groups([-2.0, -1.0, -1.0 + 5e-9, 0.0, 0.0]) == [[0], [1, 2], [3, 4]]


def test_eigensystem_sorted_and_orthonormal():
    rng = np.random.default_rng(5)
    obs = random_observable(rng, 3)
    eig = eigensystem(obs)
    assert np.all(np.diff(eig.energies) >= 0)
    np.testing.assert_allclose(eig.vectors.conj().T @ eig.vectors, np.eye(8), atol=1e-12)
    np.testing.assert_allclose(eig.energies, np.linalg.eigvalsh(obs.matrix), atol=1e-12)

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import kron_pauli, random_subspace
from tepid_adapt.ansatz import (
    AdaptiveAnsatz,
    ComputationalSubspace,
    adaptive_unitary,
    apply_adaptive,
    givens,
    invert_polar,
    n_ancilla_for,
    polar_amplitudes,
    polar_jacobian,
    polar_to_mu,
    prepare_ancilla_state,
    prepare_purification,
    system_generator,
)
from tepid_adapt.errors import ContractViolation
from tepid_adapt.quantum import PauliString, StateVector, partial_trace_ancilla


@pytest.mark.parametrize("m,n_a", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)])
def test_ancilla_count(m, n_a):
    assert n_ancilla_for(m) == n_a


def test_polar_weights_closed_form():
    phi = np.array([0.3, 1.1, 0.7])
    s, c = np.sin(phi), np.cos(phi)
    expected = [c[0] ** 2, (s[0] * c[1]) ** 2, (s[0] * s[1] * c[2]) ** 2, (s[0] * s[1] * s[2]) ** 2]
    np.testing.assert_allclose(polar_to_mu(phi), expected, atol=1e-15)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=7))
def test_polar_weights_on_simplex(phi):
    mu = polar_to_mu(phi)
    assert np.all(mu >= 0)
    assert mu.sum() == pytest.approx(1.0, abs=1e-12)


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(0)
    h = 1e-6
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(2, 9))
        phi = rng.uniform(0, np.pi, m - 1)
        jac = polar_jacobian(phi)
        fd = np.empty_like(jac)
        for l in range(m - 1):
            e = np.zeros(m - 1)
            e[l] = h
            fd[:, l] = (polar_amplitudes(phi + e) - polar_amplitudes(phi - e)) / (2 * h)
        worst = max(worst, np.abs(jac - fd).max() / np.abs(fd).max())
        assert np.all(jac[:-1][np.triu_indices(m - 1, 1)] == 0)  # d sqrt(mu_j) / d phi_l = 0 for l > j
    assert worst <= 1e-6


def test_invert_polar_examples():
    np.testing.assert_allclose(invert_polar([1.0, 0.0, 0.0]), [0.0, 0.0], atol=1e-15)
    phi = invert_polar(np.full(4, 0.25))
    np.testing.assert_allclose(phi, [np.arccos(0.5), np.arccos(1 / np.sqrt(3)), np.pi / 4], atol=1e-12)
    np.testing.assert_allclose(polar_to_mu(phi), np.full(4, 0.25), atol=1e-12)


@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
@settings(max_examples=60)
def test_invert_polar_round_trip(m, seed):
    mu = np.random.default_rng(seed).dirichlet(np.ones(m))
    phi = invert_polar(mu)
    assert np.all((phi >= 0) & (phi <= np.pi / 2))
    np.testing.assert_allclose(polar_to_mu(phi), mu, atol=1e-12)


def test_invert_polar_zero_tail():
    phi = invert_polar([0.5, 0.5, 0.0, 0.0])
    np.testing.assert_allclose(phi, [np.pi / 4, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(polar_to_mu(phi), [0.5, 0.5, 0.0, 0.0], atol=1e-15)


def test_invert_polar_rejects_non_simplex():
    with pytest.raises(ContractViolation):
        invert_polar([0.5, 0.6])


def test_givens_is_exponential_of_generator():
    gamma = np.zeros((4, 4), dtype=complex)
    gamma[2, 1], gamma[1, 2] = -1j, 1j  # exp(i phi gamma) maps e_2 -> cos e_2 + sin e_3
    np.testing.assert_allclose(givens(2, 0.4, 4), expm(1j * 0.4 * gamma), atol=1e-15)


def test_ancilla_preparation():
    phi = np.array([0.5, 1.0])
    vec = prepare_ancilla_state(phi, 2).amplitudes
    np.testing.assert_allclose(vec[:3], polar_amplitudes(phi), atol=1e-15)
    assert vec[3] == 0


def test_purification_example():
    sub = ComputationalSubspace(("010", "111"))
    v = prepare_purification([np.pi / 4], sub)
    expected = np.zeros(16)
    expected[int("0100", 2)] = expected[int("1111", 2)] = np.sqrt(0.5)
    np.testing.assert_allclose(v.amplitudes, expected, atol=1e-15)


def test_purification_trace_is_diagonal():
    rng = np.random.default_rng(2)
    sub = random_subspace(rng, 4, 5)
    phi = rng.uniform(0, np.pi / 2, 4)
    rho = partial_trace_ancilla(prepare_purification(phi, sub), 4, 3)
    expected = np.zeros((16, 16))
    expected[sub.indices, sub.indices] = polar_to_mu(phi)
    np.testing.assert_allclose(rho.entries, expected, atol=1e-14)


def test_subspace_validation():
    with pytest.raises(ContractViolation):
        ComputationalSubspace(("01", "01"))
    with pytest.raises(ContractViolation):
        ComputationalSubspace(("01", "011"))
    with pytest.raises(ContractViolation):
        ComputationalSubspace(("0a",))
    with pytest.raises(ContractViolation):
        prepare_purification([0.1, 0.2], ComputationalSubspace(("01", "10")))


def test_adaptive_ansatz_is_immutable():
    a = AdaptiveAnsatz()
    b = a.append(PauliString("XY"), 0.3)
    assert len(a) == 0 and len(b) == 1
    with pytest.raises(ValueError):
        b.theta[0] = 1.0
    with pytest.raises(ContractViolation):
        AdaptiveAnsatz((PauliString("XY"),), [0.1, 0.2])


def test_adaptive_block_matches_dense_product():
    ops = [PauliString(w) for w in ("XYI", "ZIZ", "IYX")]
    theta = np.array([0.3, -0.8, 1.2])
    ansatz = AdaptiveAnsatz(tuple(ops), theta)
    expected = np.eye(8)
    for p, t in zip(ops, theta):  # the newest generator is the outermost factor
        expected = expm(1j * t * kron_pauli(p.letters)) @ expected
    np.testing.assert_allclose(adaptive_unitary(ansatz, 3), expected, atol=1e-13)
    v = prepare_purification([0.4], ComputationalSubspace(("001", "110")))
    out = apply_adaptive(ansatz, v, 3)
    np.testing.assert_allclose(out.amplitudes, np.kron(expected, np.eye(2)) @ v.amplitudes, atol=1e-13)


def test_generators_must_stay_on_system_register():
    assert system_generator(PauliString("XZII"), 2).letters == "XZ"
    with pytest.raises(ContractViolation):
        system_generator(PauliString("XZIX"), 2)
    ansatz = AdaptiveAnsatz((PauliString("XIZ"),), [0.1])
    with pytest.raises(ContractViolation):
        apply_adaptive(ansatz, StateVector.basis("000"), 2)

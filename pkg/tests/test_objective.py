from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import kron_pauli, random_generators, random_observable, random_subspace
from tepid_adapt.ansatz import AdaptiveAnsatz, ComputationalSubspace, polar_to_mu, prepare_purification
from tepid_adapt.errors import ContractViolation, HermiticityError
from tepid_adapt.objective import (
    CostPoint,
    FreeEnergyModel,
    analytic_gradient,
    entropy_gradient,
    free_energy,
    pool_gradients,
    shannon_entropy,
)
from tepid_adapt.quantum import Observable, PauliString, StateVector, pauli_pool


def dense_free_energy(h, beta, phi, subspace, ops, theta):
    """Oracle: build the purification densely and apply exp(i t P) ⊗ I with scipy."""
    v = prepare_purification(phi, subspace)
    n = subspace.n_sites
    na = v.n_qubits - n
    state = v.amplitudes
    for p, t in zip(ops, theta):
        state = np.kron(expm(1j * t * kron_pauli(p.letters)), np.eye(2**na)) @ state
    energy = np.vdot(state, np.kron(h.matrix, np.eye(2**na)) @ state).real
    return energy - shannon_entropy(polar_to_mu(phi)) / beta


def test_entropy_values():
    assert shannon_entropy([1.0, 0.0]) == 0.0
    assert shannon_entropy(np.full(4, 0.25)) == pytest.approx(np.log(4))
    with pytest.raises(ContractViolation):
        shannon_entropy([1.1, -0.1])


def test_entropy_gradient_matches_finite_differences():
    phi = np.array([0.4, 0.9, 1.2])
    h = 1e-6
    for l in range(3):
        e = np.zeros(3)
        e[l] = h
        fd = (shannon_entropy(polar_to_mu(phi + e)) - shannon_entropy(polar_to_mu(phi - e))) / (2 * h)
        assert entropy_gradient(phi)[l] == pytest.approx(fd, abs=1e-8)


def test_free_energy_matches_dense_oracle():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, min(6, 2**n) + 1))
        h = random_observable(rng, n)
        sub = random_subspace(rng, n, m)
        ops = random_generators(rng, n, int(rng.integers(0, 5)))
        phi = rng.uniform(0, np.pi / 2, m - 1)
        theta = rng.uniform(-np.pi, np.pi, len(ops))
        p = CostPoint(phi, AdaptiveAnsatz(tuple(ops), theta), h, 1.7, sub)
        assert free_energy(p) == pytest.approx(dense_free_energy(h, 1.7, phi, sub, ops, theta), abs=1e-12)


def test_analytic_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(2, min(6, 2**n) + 1))
        h = random_observable(rng, n)
        sub = random_subspace(rng, n, m)
        ops = random_generators(rng, n, int(rng.integers(1, 6)))
        model = FreeEnergyModel(h, 2.0, sub, ops)
        x = np.concatenate([rng.uniform(0.1, 1.4, m - 1), rng.uniform(-np.pi, np.pi, len(ops))])
        _, g = model.value_and_grad(x)
        fd = np.empty_like(x)
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = 1e-5
            fd[i] = (model.value(x + e) - model.value(x - e)) / 2e-5
        np.testing.assert_allclose(g, fd, atol=1e-8 * max(1.0, np.abs(fd).max()))
        point = CostPoint(x[: m - 1], AdaptiveAnsatz(tuple(ops), x[m - 1:]), h, 2.0, sub)
        np.testing.assert_allclose(analytic_gradient(point).as_array(), g, atol=1e-14)


def test_entropy_independent_of_theta():
    sub = ComputationalSubspace(("00", "11"))
    h = Observable.from_terms([(1.0, "ZZ"), (0.5, "XI")])
    ops = (PauliString("XY"),)
    model = FreeEnergyModel(h, 1.0, sub, ops)
    x1, x2 = np.array([0.3, 0.0]), np.array([0.3, 1.0])
    assert model.value(x1) - model.energy(x1) == pytest.approx(model.value(x2) - model.energy(x2))


def test_pool_gradients_match_finite_differences():
    rng = np.random.default_rng(2)
    n = 3
    h = random_observable(rng, n)
    sub = random_subspace(rng, n, 3)
    ops = random_generators(rng, n, 3)
    model = FreeEnergyModel(h, 1.5, sub, ops)
    x = np.concatenate([[0.5, 0.8], rng.uniform(-1, 1, 3)])
    state = model.purified_state(x)
    pool = pauli_pool(n)
    grads = pool_gradients(state, pool, h)
    for k in rng.choice(len(pool), 12, replace=False):
        extended = FreeEnergyModel(h, 1.5, sub, ops + [pool[k]])
        fd = (extended.value(np.append(x, 1e-5)) - extended.value(np.append(x, -1e-5))) / 2e-5
        assert grads[k] == pytest.approx(fd, abs=1e-8)
    assert abs(grads[0]) < 1e-14  # identity word


def test_pool_gradient_methods_agree():
    rng = np.random.default_rng(3)
    h = random_observable(rng, 4)
    a = rng.normal(size=32) + 1j * rng.normal(size=32)
    state = StateVector(a / np.linalg.norm(a), 5)
    pool = pauli_pool(4)
    np.testing.assert_allclose(pool_gradients(state, pool, h, "table"),
                               pool_gradients(state, pool, h, "direct"), atol=1e-13)
    with pytest.raises(ValueError):
        pool_gradients(state, pool, h, "magic")


def test_pool_requires_real_coefficients():
    h = Observable.from_terms([(1.0, "ZZ")])
    with pytest.raises(HermiticityError):
        pool_gradients(StateVector.basis("01"), [PauliString("XY", 1j)], h)


def test_diagonal_state_has_zero_pool_gradients_for_diagonal_h():
    h = Observable.from_terms([(1.0, "ZZ"), (0.3, "ZI")])
    sub = ComputationalSubspace(("01", "10"))
    state = prepare_purification([0.6], sub)
    assert np.max(np.abs(pool_gradients(state, pauli_pool(2), h))) < 1e-15


def test_model_validation():
    h = Observable.from_terms([(1.0, "ZZ")])
    with pytest.raises(ContractViolation):
        FreeEnergyModel(h, 1.0, ComputationalSubspace(("010",)))
    with pytest.raises(ContractViolation):
        FreeEnergyModel(h, 0.0, ComputationalSubspace(("01",)))

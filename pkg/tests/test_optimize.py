from __future__ import annotations

import numpy as np
import pytest

from tepid_adapt.ansatz import invert_polar, polar_to_mu
from tepid_adapt.errors import ContractViolation, OptimizerStalled
from tepid_adapt.objective import entropy_gradient, shannon_entropy
from tepid_adapt.optimize import OptimizerConfig, check_gradient, minimize


def test_quadratic():
    a = np.array([1.0, -2.0, 0.5, 3.0])
    x, f, ok = minimize(lambda x: (float((x - a) @ (x - a)), 2 * (x - a)), np.zeros(4))
    assert ok
    np.testing.assert_allclose(x, a, atol=1e-10)


def rosenbrock(x):
    f = 100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2
    g = np.array([-400 * x[0] * (x[1] - x[0] ** 2) - 2 * (1 - x[0]), 200 * (x[1] - x[0] ** 2)])
    return float(f), g


def test_rosenbrock():
    res = minimize(rosenbrock, [-1.2, 1.0])
    assert res.converged and res.grad_norm <= 1e-10
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-6)


def test_entropy_only_objective_gives_uniform_weights():
    beta = 2.0

    def fg(phi):
        return -shannon_entropy(polar_to_mu(phi)) / beta, -entropy_gradient(phi) / beta

    res = minimize(fg, [0.2, 0.3, 1.0])
    assert res.converged
    np.testing.assert_allclose(polar_to_mu(res.x), np.full(4, 0.25), atol=1e-8)


def test_iteration_limit_is_flagged():
    res = minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_iterations=3))
    assert not res.converged
    assert res.n_iter == 3


def test_deterministic():
    a = minimize(rosenbrock, [-1.2, 1.0])
    b = minimize(rosenbrock, [-1.2, 1.0])
    assert a.x.tobytes() == b.x.tobytes() and a.n_fev == b.n_fev


def test_inconsistent_gradient_stalls_with_best_iterate():
    # the reported gradient points uphill, so no step along -grad decreases f
    def fg(x):
        return float(x @ x), -2 * x

    with pytest.raises(OptimizerStalled) as info:
        minimize(fg, [1.0, 2.0])
    assert info.value.f <= 5.0
    assert np.asarray(info.value.x).shape == (2,)


def test_empty_parameter_vector():
    res = minimize(lambda x: (1.5, np.zeros(0)), np.zeros(0))
    assert res.converged and res.fun == 1.5


def test_gradient_check():
    assert check_gradient(rosenbrock, np.array([0.3, 0.2])) < 1e-6
    with pytest.raises(ContractViolation):
        check_gradient(lambda x: (float(x @ x), x), np.array([1.0, 1.0]))
    with pytest.raises(ContractViolation):
        minimize(lambda x: (float(x @ x), x), [1.0], OptimizerConfig(check_gradient=True))


def test_converges_from_polar_start():
    # a linear-plus-entropy objective has the Boltzmann minimizer
    e = np.array([0.0, 0.7, 1.1])
    beta = 1.3

    def fg(phi):
        from tepid_adapt.ansatz import polar_amplitudes, polar_jacobian

        a = polar_amplitudes(phi)
        mu = a * a
        return (float(mu @ e) - shannon_entropy(mu) / beta,
                2 * (a * e) @ polar_jacobian(phi) - entropy_gradient(phi) / beta)

    res = minimize(fg, invert_polar(np.full(3, 1 / 3)))
    w = np.exp(-beta * e)
    np.testing.assert_allclose(polar_to_mu(res.x), w / w.sum(), atol=1e-10)

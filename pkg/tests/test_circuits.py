from __future__ import annotations

import numpy as np
import pytest

from conftest import random_subspace
from tepid_adapt.ansatz import ComputationalSubspace, n_ancilla_for, prepare_purification
from tepid_adapt.circuits import GateCircuit, basis_permutation, build_um_circuit
from tepid_adapt.errors import ContractViolation


@pytest.mark.parametrize("variant", ["intuitive", "scalable"])
def test_variants_reproduce_purification(variant):
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(3, 6))
        m = int(rng.integers(1, 9))
        sub = random_subspace(rng, n, m)
        phi = rng.uniform(0, np.pi / 2, m - 1)
        direct = prepare_purification(phi, sub)
        circ = build_um_circuit(phi, sub, variant)
        np.testing.assert_allclose(circ.simulate().amplitudes, direct.amplitudes, atol=1e-12)


def test_oversized_subspace_for_three_weights():
    # m = 3 on two ancillas leaves a fourth ancilla value with zero amplitude
    sub = ComputationalSubspace(("010", "011", "101", "111"))
    phi = [0.7, 0.4]
    circ = build_um_circuit(phi, sub, "scalable")
    assert circ.counts["mcprep"] == 4
    np.testing.assert_allclose(circ.simulate().amplitudes,
                               prepare_purification(phi, sub.head(3)).amplitudes, atol=1e-14)


def test_text_round_trip():
    sub = ComputationalSubspace(("0101", "0110", "0100"))
    for variant in ("intuitive", "scalable"):
        circ = build_um_circuit([0.3, 1.2], sub, variant)
        text = circ.to_text()
        again = GateCircuit.from_text(text)
        assert again.to_text() == text
        np.testing.assert_array_equal(again.simulate().amplitudes, circ.simulate().amplitudes)


def test_text_errors():
    with pytest.raises(ValueError, match="line 2"):
        GateCircuit.from_text("# tepid-circuit 1\ngivens k=1 angle=0.1\n")
    with pytest.raises(ValueError):
        GateCircuit.from_text("registers system=2 ancilla=1\nswap a=1\n")


def test_gate_counts():
    sub = ComputationalSubspace(("0101", "0110", "0100", "0111"))
    circ = build_um_circuit([0.1, 0.2, 0.3], sub, "scalable")
    c = circ.counts
    assert (c["givens"], c["mcprep"], c["cnot"]) == (3, 4, 0)
    na = n_ancilla_for(4)
    # 3 Givens at 2 n_a each; flips weighted by the controlled-X cost plus X pairs on open controls
    flips = sum(lbl.count("1") for lbl in sub.elements)
    opens = sum(format(k, "02b").count("0") for k in range(4))
    assert c["elementary"] == 3 * 2 * na + flips * (2 * na - 1) + 2 * opens
    intuitive = build_um_circuit([0.1, 0.2, 0.3], sub, "intuitive").counts
    assert intuitive["cnot"] == na and intuitive["permutation"] == 1


def test_basis_permutation_is_bijective():
    sub = ComputationalSubspace(("110", "001"))
    perm = basis_permutation(sub)
    assert perm[:2] == (6, 1)
    assert sorted(perm) == list(range(8))


def test_contract_violations():
    sub = ComputationalSubspace(("01", "10"))
    with pytest.raises(ContractViolation):
        build_um_circuit([0.1, 0.2], sub)
    with pytest.raises(ContractViolation):
        build_um_circuit([0.1], sub, "diagonal")

"""Gate-level realizations of the static preparation block.

Two variants are built:

``intuitive``
    Givens rotations on the ancilla register, one layer of CNOTs copying the
    ancilla value into the last ``n_a`` system qubits, then a basis
    permutation sending ``|k-1>`` to ``|c_k>`` on the system register.
``scalable``
    Givens rotations, then one multi-controlled block per subspace element
    that flips the system bits of ``c_k`` when the ancillas read ``|k-1>``.

Qubits are numbered globally: system qubits ``0 .. n_s-1`` followed by
ancilla qubits ``n_s .. n_s+n_a-1`` (ancilla 1 is the most significant bit
of the ancilla value).

Text format (one gate per line, ``#`` starts a comment)::

    # tepid-circuit 1
    registers system=3 ancilla=2
    givens k=1 angle=0.78539816339744828
    cnot control=4 target=2
    mcprep pattern=01 target=011
    permutation map=0>2,1>3,2>5,3>0,...
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .ansatz import ComputationalSubspace, n_ancilla_for
from .errors import ContractViolation
from .quantum import StateVector

FORMAT_HEADER = "# tepid-circuit 1"
VARIANTS = ("intuitive", "scalable")


@dataclass(frozen=True)
class Gate:
    kind: str  # givens | cnot | mcprep | permutation
    k: int = 0
    angle: float = 0.0
    control: int = 0
    target: int = 0
    pattern: str = ""
    bits: str = ""
    mapping: tuple[int, ...] = ()


@dataclass
class GateCircuit:
    n_system: int
    n_ancilla: int
    gates: list[Gate] = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return self.n_system + self.n_ancilla

    @property
    def counts(self) -> dict[str, int]:
        """Per-kind tallies plus an elementary-gate estimate.

        Cost model: a Givens rotation on ``n_a`` ancillas costs ``2 n_a``
        CNOTs; a multi-controlled X with ``n_a`` controls costs
        ``max(1, 2 n_a - 1)``, and every open control adds two X gates.
        Permutations are not decomposed and are left out of the estimate.
        """
        tally = Counter(g.kind for g in self.gates)
        n_a = self.n_ancilla
        elementary = 0
        for g in self.gates:
            if g.kind == "givens":
                elementary += 2 * n_a
            elif g.kind == "cnot":
                elementary += 1
            elif g.kind == "mcprep":
                elementary += g.bits.count("1") * max(1, 2 * n_a - 1) + 2 * g.pattern.count("0")
        out = {kind: tally.get(kind, 0) for kind in ("givens", "cnot", "mcprep", "permutation")}
        out["elementary"] = elementary
        return out

    def simulate(self) -> StateVector:
        """Run the circuit on ``|0...0>``."""
        ns, na = self.n_system, self.n_ancilla
        psi = np.zeros((1 << ns, 1 << na), dtype=complex)
        psi[0, 0] = 1.0
        for g in self.gates:
            psi = _apply_gate(psi, g, ns, na)
        return StateVector(psi.reshape(-1), ns + na)

    def to_text(self) -> str:
        lines = [FORMAT_HEADER, f"registers system={self.n_system} ancilla={self.n_ancilla}"]
        for g in self.gates:
            if g.kind == "givens":
                lines.append(f"givens k={g.k} angle={g.angle!r}")
            elif g.kind == "cnot":
                lines.append(f"cnot control={g.control} target={g.target}")
            elif g.kind == "mcprep":
                lines.append(f"mcprep pattern={g.pattern or '-'} target={g.bits}")
            else:
                pairs = ",".join(f"{i}>{j}" for i, j in enumerate(g.mapping))
                lines.append(f"permutation map={pairs}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GateCircuit":
        circuit = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            kind, *fields = line.split()
            kv = dict(f.split("=", 1) for f in fields)
            if kind == "registers":
                circuit = cls(int(kv["system"]), int(kv["ancilla"]))
                continue
            if circuit is None:
                raise ValueError(f"line {lineno}: gate before 'registers' line")
            if kind == "givens":
                gate = Gate("givens", k=int(kv["k"]), angle=float(kv["angle"]))
            elif kind == "cnot":
                gate = Gate("cnot", control=int(kv["control"]), target=int(kv["target"]))
            elif kind == "mcprep":
                pattern = "" if kv["pattern"] == "-" else kv["pattern"]
                gate = Gate("mcprep", pattern=pattern, bits=kv["target"])
            elif kind == "permutation":
                pairs = [p.split(">") for p in kv["map"].split(",")]
                mapping = [0] * len(pairs)
                for i, j in pairs:
                    mapping[int(i)] = int(j)
                gate = Gate("permutation", mapping=tuple(mapping))
            else:
                raise ValueError(f"line {lineno}: unknown gate kind {kind!r}")
            circuit.gates.append(gate)
        if circuit is None:
            raise ValueError("missing 'registers' line")
        return circuit


def _apply_gate(psi: np.ndarray, g: Gate, ns: int, na: int) -> np.ndarray:
    out = psi.copy()
    if g.kind == "givens":
        c, s = math.cos(g.angle), math.sin(g.angle)
        lo, hi = psi[:, g.k - 1], psi[:, g.k]
        out[:, g.k - 1] = c * lo - s * hi
        out[:, g.k] = s * lo + c * hi
    elif g.kind == "cnot":
        flat = psi.reshape(-1)
        n = ns + na
        idx = np.arange(flat.size)
        cbit = 1 << (n - 1 - g.control)
        tbit = 1 << (n - 1 - g.target)
        src = np.where(idx & cbit, idx ^ tbit, idx)
        out = flat[src].reshape(psi.shape)
    elif g.kind == "mcprep":
        col = int(g.pattern, 2) if g.pattern else 0
        rows = np.arange(psi.shape[0])
        out[:, col] = psi[rows ^ int(g.bits, 2), col]
    elif g.kind == "permutation":
        out = np.zeros_like(psi)
        out[list(g.mapping)] = psi
    else:
        raise ValueError(f"unknown gate kind {g.kind!r}")
    return out


def basis_permutation(subspace: ComputationalSubspace) -> tuple[int, ...]:
    """A full permutation of system basis indices with ``k-1 -> c_k``.

    Unconstrained sources are paired with unused targets in increasing order.
    """
    dim = 1 << subspace.n_sites
    mapping = [-1] * dim
    for k, c in enumerate(subspace.indices):
        mapping[k] = c
    free_targets = iter(sorted(set(range(dim)) - set(subspace.indices)))
    for i in range(dim):
        if mapping[i] < 0:
            mapping[i] = next(free_targets)
    return tuple(mapping)


def build_um_circuit(phi, subspace: ComputationalSubspace, variant: str = "scalable") -> GateCircuit:
    """Circuit for the static block.

    ``subspace`` may list up to ``2**n_a`` elements where ``n_a`` is fixed by
    ``len(phi) + 1``; elements beyond the first ``m`` sit on ancilla values
    that carry zero amplitude.
    """
    phi = np.asarray(phi, dtype=float).reshape(-1)
    m = phi.size + 1
    na = n_ancilla_for(m)
    ns = subspace.n_sites
    if subspace.m < m or subspace.m > max(1 << na, m):
        raise ContractViolation(f"subspace of size {subspace.m} does not fit m = {m}")
    if variant not in VARIANTS:
        raise ContractViolation(f"unknown variant {variant!r}")
    circuit = GateCircuit(ns, na)
    for k, angle in enumerate(phi, 1):
        circuit.gates.append(Gate("givens", k=k, angle=float(angle)))
    if variant == "intuitive":
        if na > ns:
            raise ContractViolation("intuitive variant needs at least as many system as ancilla qubits")
        for j in range(1, na + 1):
            circuit.gates.append(Gate("cnot", control=ns + j - 1, target=ns - na + j - 1))
        circuit.gates.append(Gate("permutation", mapping=basis_permutation(subspace.head(m))))
    else:
        for k, label in enumerate(subspace.elements):
            pattern = format(k, f"0{na}b") if na else ""
            circuit.gates.append(Gate("mcprep", pattern=pattern, bits=label))
    return circuit

"""Versioned plain-text serialization of :class:`RunResult`.

Layout (schema 1)::

    # tepid-adapt run-result
    schema = 1
    <key> = <value>            header, one per line
    [hamiltonian]
    <weight> <word>            one Pauli term per line
    [trace]
    n_operators free_energy pool_grad_norm chosen n_params converged
    ...
    [path]
    n_operators p_1 p_2 ...    optimized parameters after each adaptation
    [eigenpairs]
    rank subspace_index energy
    ...

Reals are written with 17 significant digits so a document round-trips
bit for bit; lists in the header are comma separated and an empty entry is
written as ``-``.  Eigenvectors and the Gibbs state are not stored: they
are rebuilt from the angles on load.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .ansatz import ComputationalSubspace
from .driver import RunResult, TraceRow, extract_eigenstates
from .errors import ContractViolation
from .objective import FreeEnergyModel
from .quantum import DensityMatrix, Observable, PauliString

SCHEMA_VERSION = 1
MAGIC = "# tepid-adapt run-result"
TRACE_COLUMNS = ("n_operators", "free_energy", "pool_grad_norm", "chosen", "n_params", "converged")
EIGEN_COLUMNS = ("rank", "subspace_index", "energy")


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def _fmt_list(values, conv=fmt) -> str:
    items = [conv(v) for v in values]
    return ",".join(items) if items else "-"


def _parse_list(text: str, conv=float) -> list:
    return [] if text == "-" else [conv(v) for v in text.split(",")]


def _fmt_meta(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt(value)
    return str(value)


def _parse_meta(text: str):
    if text in ("true", "false"):
        return text == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def dumps(result: RunResult) -> str:
    lines = [MAGIC, f"schema = {SCHEMA_VERSION}"]
    header = {
        "n_sites": result.hamiltonian.n_qubits,
        "beta_bar": fmt(result.beta_bar),
        "subspace": _fmt_list(result.subspace.elements, str),
        "terminated_by": result.terminated_by,
        "free_energy": fmt(result.free_energy),
        "phi_star": _fmt_list(result.phi_star),
        "theta_star": _fmt_list(result.theta_star),
        "operators": _fmt_list((p.letters for p in result.operators), str),
    }
    lines += [f"{k} = {v}" for k, v in header.items()]
    lines += [f"meta.{k} = {_fmt_meta(v)}" for k, v in sorted(result.metadata.items())]
    lines.append("[hamiltonian]")
    lines += [f"{fmt(w)} {word}" for w, word in result.hamiltonian.terms]
    lines.append("[trace]")
    lines.append(" ".join(TRACE_COLUMNS))
    for r in result.trace:
        lines.append(" ".join([str(r.n_operators), fmt(r.free_energy), fmt(r.pool_grad_norm),
                               r.chosen or "-", str(r.n_params), "1" if r.converged else "0"]))
    lines.append("[path]")
    for r in result.trace:
        lines.append(" ".join([str(r.n_operators)] + [fmt(v) for v in r.params]))
    lines.append("[eigenpairs]")
    lines.append(" ".join(EIGEN_COLUMNS))
    for k, p in enumerate(result.eigenpairs):
        lines.append(f"{k} {p.subspace_index} {fmt(p.energy)}")
    return "\n".join(lines) + "\n"


def dump(result: RunResult, path) -> Path:
    path = Path(path)
    path.write_text(dumps(result))
    return path


def loads(text: str) -> RunResult:
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise ContractViolation("not a run-result document")
    header: dict[str, str] = {}
    sections: dict[str, list[str]] = {}
    current = None
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is None:
            if " = " not in line:
                raise ContractViolation(f"line {lineno}: expected 'key = value'")
            key, value = line.split(" = ", 1)
            header[key] = value
        else:
            sections[current].append(line)
    if int(header.get("schema", -1)) != SCHEMA_VERSION:
        raise ContractViolation(f"unsupported schema {header.get('schema')!r}")

    n = int(header["n_sites"])
    terms = [(float(w), word) for w, word in (ln.split() for ln in sections["hamiltonian"])]
    H = Observable(tuple(terms), n)
    subspace = ComputationalSubspace(tuple(_parse_list(header["subspace"], str)))
    operators = tuple(PauliString(w) for w in _parse_list(header["operators"], str))
    phi = np.array(_parse_list(header["phi_star"]))
    theta = np.array(_parse_list(header["theta_star"]))

    trace_lines = sections["trace"]
    if tuple(trace_lines[0].split()) != TRACE_COLUMNS:
        raise ContractViolation("trace columns do not match the schema")
    paths = {}
    for ln in sections.get("path", []):
        head, *vals = ln.split()
        paths[int(head)] = np.array([float(v) for v in vals])
    trace = []
    for ln in trace_lines[1:]:
        k, f, g, chosen, npar, conv = ln.split()
        trace.append(TraceRow(int(k), float(f), float(g), "" if chosen == "-" else chosen,
                              int(npar), conv == "1", paths.get(int(k), np.zeros(0))))

    metadata = {k[5:]: _parse_meta(v) for k, v in header.items() if k.startswith("meta.")}
    model = FreeEnergyModel(H, float(header["beta_bar"]), subspace, operators)
    psi = model.state_matrix(np.concatenate([phi, theta]))
    rho = psi @ psi.conj().T
    result = RunResult(
        hamiltonian=H,
        beta_bar=float(header["beta_bar"]),
        subspace=subspace,
        phi_star=phi,
        theta_star=theta,
        operators=operators,
        trace=trace,
        eigenpairs=[],
        gibbs_state=DensityMatrix(0.5 * (rho + rho.conj().T), n),
        terminated_by=header["terminated_by"],
        free_energy=float(header["free_energy"]),
        metadata=metadata,
    )
    result.eigenpairs = extract_eigenstates(result)
    return result


def load(path) -> RunResult:
    return loads(Path(path).read_text())

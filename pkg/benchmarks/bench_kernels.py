"""Compare the compiled and numpy Pauli kernels.

Usage::

    python benchmarks/bench_kernels.py [--sites 6] [--m 4] [--ops 60] [--repeat 5]

Times ``apply_rotations``, ``adjoint_sweep`` and one full free-energy
gradient on the six-site antiferromagnetic chain with a random ansatz, and
checks that both backends agree.
"""

from __future__ import annotations

import argparse
import timeit
from contextlib import contextmanager

import numpy as np

from tepid_adapt import kernels
from tepid_adapt.ansatz import ComputationalSubspace
from tepid_adapt.objective import FreeEnergyModel
from tepid_adapt.quantum import PauliString
from tepid_adapt.xxz import XXZConfig, build_xxz

KERNEL_NAMES = ("apply_pauli", "rotate_pauli", "pauli_overlap", "apply_rotations", "adjoint_sweep")


@contextmanager
def backend(name: str):
    impl = kernels.get_backend(name)
    saved = {k: getattr(kernels, k) for k in KERNEL_NAMES}
    try:
        for k in KERNEL_NAMES:
            setattr(kernels, k, getattr(impl, k))
        yield impl
    finally:
        for k, v in saved.items():
            setattr(kernels, k, v)


def build_problem(n_sites: int, m: int, n_ops: int, seed: int):
    rng = np.random.default_rng(seed)
    H = build_xxz(XXZConfig(n_sites, 1.5))
    labels = rng.choice(1 << n_sites, size=m, replace=False)
    sub = ComputationalSubspace(tuple(format(int(v), f"0{n_sites}b") for v in labels))
    words = []
    while len(words) < n_ops:
        w = "".join(rng.choice(list("IXYZ"), size=n_sites))
        if set(w) != {"I"}:
            words.append(PauliString(w))
    model = FreeEnergyModel(H, 3.0, sub, words)
    x = np.concatenate([rng.uniform(0.1, 1.4, m - 1), rng.uniform(-np.pi, np.pi, n_ops)])
    return model, x


def bench(name: str, model: FreeEnergyModel, x: np.ndarray, repeat: int) -> dict[str, float]:
    _, theta = model.split(x)
    theta = np.ascontiguousarray(theta)
    with backend(name) as impl:
        psi0 = model.state_matrix(x)
        lam0 = model.hamiltonian.matrix @ psi0
        grad = np.empty(theta.size)

        def rotations():
            psi = psi0.copy()
            impl.apply_rotations(psi, model.xs, model.zs, model.nys, theta)

        def sweep():
            impl.adjoint_sweep(psi0.copy(), lam0.copy(), model.xs, model.zs, model.nys, theta, grad)

        def gradient():
            model.value_and_grad(x)

        out = {}
        for label, fn in (("apply_rotations", rotations), ("adjoint_sweep", sweep), ("value_and_grad", gradient)):
            number = 20
            out[label] = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
        out["_grad"] = model.value_and_grad(x)[1]
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, default=6)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--ops", type=int, default=60)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    model, x = build_problem(args.sites, args.m, args.ops, args.seed)
    results = {"python": bench("python", model, x, args.repeat)}
    try:
        results["cython"] = bench("cython", model, x, args.repeat)
    except ImportError as exc:
        print(f"cython backend unavailable: {exc}")

    print(f"sites={args.sites} m={args.m} ops={args.ops} (best of {args.repeat})")
    print(f"{'kernel':<18}" + "".join(f"{b:>14}" for b in results) + ("     speedup" if len(results) == 2 else ""))
    for label in ("apply_rotations", "adjoint_sweep", "value_and_grad"):
        row = f"{label:<18}" + "".join(f"{r[label] * 1e6:>11.1f} us" for r in results.values())
        if len(results) == 2:
            row += f"{results['python'][label] / results['cython'][label]:>11.1f}x"
        print(row)
    if len(results) == 2:
        diff = np.abs(results["python"]["_grad"] - results["cython"]["_grad"]).max()
        print(f"max gradient difference between backends: {diff:.1e}")


if __name__ == "__main__":
    main()

"""Pure numpy implementation of the Pauli kernels.

Mirrors ``_ckernels`` function for function; used when the compiled module
is unavailable or ``TEPID_ADAPT_PURE_PYTHON`` is set.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

_IPOW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


@lru_cache(maxsize=4096)
def pauli_action(rows: int, x: int, z: int) -> tuple[np.ndarray, np.ndarray]:
    """Row permutation ``r -> r ^ x`` and the sign ``(-1)**popcount((r^x) & z)``."""
    r = np.arange(rows, dtype=np.int64)
    perm = r ^ x
    bits = perm & z
    parity = np.zeros(rows, dtype=np.int64)
    while np.any(bits):
        parity ^= bits & 1
        bits = bits >> 1
    sign = 1.0 - 2.0 * parity
    perm.setflags(write=False)
    sign.setflags(write=False)
    return perm, sign


def apply_pauli(psi: np.ndarray, x: int, z: int, ny: int) -> np.ndarray:
    perm, sign = pauli_action(psi.shape[0], int(x), int(z))
    return (_IPOW[ny & 3] * sign)[:, None] * psi[perm]


def rotate_pauli(psi: np.ndarray, x: int, z: int, ny: int, theta: float) -> None:
    perm, sign = pauli_action(psi.shape[0], int(x), int(z))
    factor = (1.0j * np.sin(theta) * _IPOW[ny & 3]) * sign
    psi[...] = np.cos(theta) * psi + factor[:, None] * psi[perm]


def pauli_overlap(a: np.ndarray, b: np.ndarray, x: int, z: int, ny: int) -> complex:
    perm, sign = pauli_action(a.shape[0], int(x), int(z))
    rows = np.einsum("rc,rc->r", a.conj(), b[perm])
    return complex(_IPOW[ny & 3] * np.dot(sign, rows))


def apply_rotations(psi, xs, zs, nys, thetas) -> None:
    for x, z, ny, t in zip(xs, zs, nys, thetas):
        rotate_pauli(psi, int(x), int(z), int(ny), float(t))


def adjoint_sweep(psi, lam, xs, zs, nys, thetas, grad) -> None:
    for k in range(len(thetas) - 1, -1, -1):
        x, z, ny, t = int(xs[k]), int(zs[k]), int(nys[k]), float(thetas[k])
        grad[k] = -2.0 * pauli_overlap(lam, psi, x, z, ny).imag
        rotate_pauli(psi, x, z, ny, -t)
        rotate_pauli(lam, x, z, ny, -t)

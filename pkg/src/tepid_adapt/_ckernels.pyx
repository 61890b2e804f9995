# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Pauli kernels.

All state arguments are C-contiguous complex128 arrays of shape
``(2**n, k)``; a Pauli word acts on the row index only, so the trailing
axis can carry ancilla columns or a batch of vectors.

A Pauli word is encoded by ``(x, z, ny)``: the bit-flip mask, the phase
mask (qubits carrying Y or Z) and the number of Y letters.  Its action is
``(P psi)[r] = i**ny * (-1)**popcount((r ^ x) & z) * psi[r ^ x]``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline double _sign(unsigned long long r, unsigned long long z) noexcept nogil:
    return -1.0 if (__builtin_popcountll(r & z) & 1) else 1.0


cdef inline double complex _ipow(int ny) noexcept nogil:
    ny = ny & 3
    if ny == 0:
        return 1.0
    elif ny == 1:
        return 1.0j
    elif ny == 2:
        return -1.0
    return -1.0j


cdef void _rotate(double complex[:, ::1] psi, unsigned long long x,
                  unsigned long long z, int ny, double theta) noexcept nogil:
    cdef Py_ssize_t rows = psi.shape[0], cols = psi.shape[1]
    cdef Py_ssize_t r, rp, c
    cdef double ct = cos(theta), st = sin(theta)
    cdef double complex ph = 1.0j * st * _ipow(ny)
    cdef double complex a, b, fa, fb, d
    if x == 0:
        for r in range(rows):
            d = ct + ph * _sign(r, z)
            for c in range(cols):
                psi[r, c] = d * psi[r, c]
        return
    for r in range(rows):
        rp = r ^ x
        if rp < r:
            continue
        # (P psi)[r] picks psi[rp] with sign of rp & z, and vice versa
        fa = ph * _sign(rp, z)
        fb = ph * _sign(r, z)
        for c in range(cols):
            a = psi[r, c]
            b = psi[rp, c]
            psi[r, c] = ct * a + fa * b
            psi[rp, c] = ct * b + fb * a


cdef double complex _overlap(double complex[:, ::1] a, double complex[:, ::1] b,
                             unsigned long long x, unsigned long long z,
                             int ny) noexcept nogil:
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1]
    cdef Py_ssize_t r, rp, c
    cdef double complex acc = 0.0, row_acc
    cdef double s
    for r in range(rows):
        rp = r ^ x
        s = _sign(rp, z)
        row_acc = 0.0
        for c in range(cols):
            row_acc = row_acc + a[r, c].conjugate() * b[rp, c]
        acc = acc + s * row_acc
    return acc * _ipow(ny)


def apply_pauli(double complex[:, ::1] psi, unsigned long long x,
                unsigned long long z, int ny):
    """Return ``P psi`` as a new array."""
    cdef Py_ssize_t rows = psi.shape[0], cols = psi.shape[1]
    out_arr = np.empty((rows, cols), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex ph = _ipow(ny)
    cdef Py_ssize_t r, rp, c
    cdef double complex f
    with nogil:
        for r in range(rows):
            rp = r ^ x
            f = ph * _sign(rp, z)
            for c in range(cols):
                out[r, c] = f * psi[rp, c]
    return out_arr


def rotate_pauli(double complex[:, ::1] psi, unsigned long long x,
                 unsigned long long z, int ny, double theta):
    """In place: ``psi <- exp(i theta P) psi``."""
    with nogil:
        _rotate(psi, x, z, ny, theta)


def pauli_overlap(double complex[:, ::1] a, double complex[:, ::1] b,
                  unsigned long long x, unsigned long long z, int ny):
    """Return ``<a|P|b>`` summed over columns."""
    cdef double complex out
    with nogil:
        out = _overlap(a, b, x, z, ny)
    return complex(out)


def apply_rotations(double complex[:, ::1] psi,
                    const unsigned long long[::1] xs,
                    const unsigned long long[::1] zs,
                    const int[::1] nys,
                    const double[::1] thetas):
    """In place: apply ``exp(i thetas[k] P_k)`` for k = 0, 1, ... in order."""
    cdef Py_ssize_t k, n = thetas.shape[0]
    with nogil:
        for k in range(n):
            _rotate(psi, xs[k], zs[k], nys[k], thetas[k])


def adjoint_sweep(double complex[:, ::1] psi, double complex[:, ::1] lam,
                  const unsigned long long[::1] xs,
                  const unsigned long long[::1] zs,
                  const int[::1] nys,
                  const double[::1] thetas,
                  double[::1] grad):
    """Backward pass of the generator-angle gradient.

    On entry ``psi`` is the fully rotated state and ``lam = H psi``.  Fills
    ``grad[k] = -2 Im <lam_k|P_k|psi_k>`` and leaves both arrays unrotated
    (``psi`` back at the reference state, ``lam = V^dagger H psi``).
    """
    cdef Py_ssize_t k, n = thetas.shape[0]
    cdef double complex ov
    with nogil:
        for k in range(n - 1, -1, -1):
            ov = _overlap(lam, psi, xs[k], zs[k], nys[k])
            grad[k] = -2.0 * ov.imag
            _rotate(psi, xs[k], zs[k], nys[k], -thetas[k])
            _rotate(lam, xs[k], zs[k], nys[k], -thetas[k])

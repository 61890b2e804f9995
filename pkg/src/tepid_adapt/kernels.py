"""Backend selection for the Pauli kernels.

The compiled extension is preferred.  Setting the environment variable
``TEPID_ADAPT_PURE_PYTHON=1`` forces the numpy fallback, which is also used
automatically when the extension was not built.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

__all__ = [
    "BACKEND",
    "adjoint_sweep",
    "apply_pauli",
    "apply_rotations",
    "get_backend",
    "pauli_overlap",
    "rotate_pauli",
]


def _load_compiled() -> ModuleType | None:
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


def get_backend(name: str) -> ModuleType:
    """Return the kernel module for ``name`` (``"cython"`` or ``"python"``)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        mod = _load_compiled()
        if mod is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return mod
    raise ValueError(f"unknown kernel backend {name!r}")


_impl: ModuleType
if os.environ.get("TEPID_ADAPT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    _impl = _load_compiled() or _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

apply_pauli = _impl.apply_pauli
rotate_pauli = _impl.rotate_pauli
pauli_overlap = _impl.pauli_overlap
apply_rotations = _impl.apply_rotations
adjoint_sweep = _impl.adjoint_sweep

"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TepidError(Exception):
    """Base class for all package errors."""


class ContractViolation(TepidError, ValueError):
    """An argument broke a documented precondition (widths, ranges, labels)."""


class ResourceError(TepidError, MemoryError):
    """The requested problem exceeds the dense-simulation cap."""


class HermiticityError(TepidError, ArithmeticError):
    """An expectation value or gradient came back with a non-negligible imaginary part."""


class PSDViolationError(TepidError, ArithmeticError):
    """A density matrix has an eigenvalue below the clipping tolerance."""


class DegeneracySplitError(TepidError, ValueError):
    """A truncation cuts through a degenerate energy level in strict mode."""


class OptimizerStalled(TepidError, RuntimeError):
    """The line search could not make progress.

    The best iterate seen so far is kept on the exception so callers can
    continue from it.
    """

    def __init__(self, message: str, x, f: float, grad_norm: float, n_iter: int):
        super().__init__(message)
        self.x = x
        self.f = f
        self.grad_norm = grad_norm
        self.n_iter = n_iter


class ConfigError(TepidError, ValueError):
    """A configuration file could not be parsed or validated."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class RunFailure(TepidError, RuntimeError):
    """An experiment could not produce its primary run."""

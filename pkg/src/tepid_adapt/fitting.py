"""Least-squares fits of ``a N**b`` and ``a (exp(b N) - 1)`` to scaling data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

FIT_KINDS = ("power", "exponential")


@dataclass(frozen=True)
class FitResult:
    model_kind: str
    a: float
    b: float
    mse: float
    status: str = "ok"  # ok | failed
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def __call__(self, n) -> np.ndarray:
        return model_curve(self.model_kind, self.a, self.b, n)


def model_curve(kind: str, a: float, b: float, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if kind == "power":
        return a * n**b
    if kind == "exponential":
        return a * np.expm1(b * n)
    raise ValueError(f"unknown fit kind {kind!r}")


def _failed(kind: str, message: str) -> FitResult:
    return FitResult(kind, math.nan, math.nan, math.nan, "failed", message)


def _refine(kind, x, y, a0, b0) -> tuple[float, float]:
    sol = least_squares(lambda p: model_curve(kind, p[0], p[1], x) - y, [a0, b0],
                        method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=20000)
    return float(sol.x[0]), float(sol.x[1])


def _mse(kind, a, b, x, y) -> float:
    return float(np.mean((model_curve(kind, a, b, x) - y) ** 2))


def _best_a(g: np.ndarray, y: np.ndarray) -> float:
    gg = float(g @ g)
    return float(g @ y) / gg if gg > 0 else math.nan


def fit_curve(points, kind: str) -> FitResult:
    """Fit ``points`` (pairs ``(N, f)``) with the model ``kind``.

    The power law starts from a log-log linear solve; the exponential model
    scans ``b`` with the optimal ``a`` in closed form.  Both are then refined
    by Levenberg-Marquardt on the linear-space residuals, which the reported
    MSE also uses.
    """
    if kind not in FIT_KINDS:
        raise ValueError(f"unknown fit kind {kind!r}")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        return _failed(kind, "need at least three (N, f) points")
    x, y = pts[:, 0], pts[:, 1]
    if not np.all(np.isfinite(pts)):
        return _failed(kind, "non-finite input")
    if np.ptp(x) == 0:
        return _failed(kind, "all abscissae coincide; the design matrix is singular")

    if kind == "power":
        if np.any(x <= 0) or np.any(y <= 0):
            return _failed(kind, "power fit needs positive N and f")
        b0, loga = np.polyfit(np.log(x), np.log(y), 1)
        a, b = _refine(kind, x, y, math.exp(loga), b0)
    else:
        grid = np.concatenate([-np.logspace(1, -8, 181), np.logspace(-8, 1, 181)])
        best = (math.inf, math.nan, math.nan)
        for b in grid:
            g = np.expm1(b * x)
            a = _best_a(g, y)
            if not math.isfinite(a):
                continue
            sse = float(np.sum((a * g - y) ** 2))
            if sse < best[0]:
                best = (sse, a, b)
        if not math.isfinite(best[0]):
            return _failed(kind, "no admissible exponent on the scan grid")
        _, a, b = best
        a_r, b_r = _refine(kind, x, y, a, b)
        # keep the refinement only if it improved on the scan
        if math.isfinite(a_r) and _mse(kind, a_r, b_r, x, y) <= _mse(kind, a, b, x, y):
            a, b = a_r, b_r
    mse = _mse(kind, a, b, x, y)
    if not math.isfinite(mse):
        return _failed(kind, "fit diverged")
    return FitResult(kind, a, b, mse)

"""Full-memory BFGS with a Wolfe line search.

Convergence is declared when ``max|grad| <= grad_tol_inf``.  Close to a
minimum the sufficient-decrease test becomes meaningless in floating point,
so the line search also accepts the approximate Wolfe conditions of Hager
and Zhang: the function may not rise by more than a rounding allowance and
the directional derivative must satisfy ``(2 c1 - 1) d0 >= d(a) >= c2 d0``.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation, OptimizerStalled

log = logging.getLogger(__name__)

FunGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]

DEBUG = os.environ.get("TEPID_ADAPT_DEBUG", "") not in ("", "0")


@dataclass(frozen=True)
class OptimizerConfig:
    grad_tol_inf: float = 1e-10
    max_iterations: int = 20000
    c1: float = 1e-4
    c2: float = 0.9
    max_line_search: int = 60
    check_gradient: bool = DEBUG


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    converged: bool
    n_iter: int
    n_fev: int
    message: str

    @property
    def grad_norm(self) -> float:
        return float(np.max(np.abs(self.grad), initial=0.0))

    def __iter__(self):
        # unpacks as (x, f, converged)
        return iter((self.x, self.fun, self.converged))


class _LineSearchFailed(Exception):
    pass


def check_gradient(fg: FunGrad, x: np.ndarray, step: float = 1e-5, rtol: float = 1e-6) -> float:
    """Largest relative deviation between ``fg``'s gradient and central differences."""
    _, g = fg(x)
    fd = np.empty_like(g)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        fd[i] = (fg(x + e)[0] - fg(x - e)[0]) / (2 * step)
    scale = max(1.0, float(np.max(np.abs(fd), initial=0.0)))
    dev = float(np.max(np.abs(g - fd), initial=0.0)) / scale
    if dev > rtol:
        raise ContractViolation(f"gradient disagrees with finite differences (rel. dev {dev:.2e})")
    return dev


def _cubic_min(a, fa, da, b, fb, db):
    """Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), or None."""
    d1 = da + db - 3 * (fa - fb) / (a - b)
    disc = d1 * d1 - da * db
    if disc < 0:
        return None
    d2 = math.copysign(math.sqrt(disc), b - a)
    denom = db - da + 2 * d2
    if denom == 0:
        return None
    return b - (b - a) * (db + d2 - d1) / denom


class _Counter:
    def __init__(self, fg: FunGrad):
        self.fg = fg
        self.n = 0
        self.best = (math.inf, None, None)

    def __call__(self, x):
        f, g = self.fg(x)
        self.n += 1
        if math.isfinite(f) and f < self.best[0]:
            self.best = (f, x.copy(), g.copy())
        return f, g


def _line_search(fg, x, f0, g0, p, alpha1, cfg: OptimizerConfig):
    d0 = float(g0 @ p)
    c1, c2 = cfg.c1, cfg.c2
    eps_f = 1e-12 * (1.0 + abs(f0))

    def evaluate(a):
        f, g = fg(x + a * p)
        return f, g, float(g @ p)

    def armijo(a, f):
        return f <= f0 + c1 * a * d0

    def acceptable(a, f, d):
        if abs(d) > -c2 * d0:
            return False
        if armijo(a, f):
            return True
        return f <= f0 + eps_f and (2 * c1 - 1) * d0 >= d

    def zoom(lo, f_lo, d_lo, hi, f_hi, d_hi, budget):
        for _ in range(budget):
            width = hi - lo
            a = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            left, right = min(lo, hi), max(lo, hi)
            if a is None or not (left + 0.1 * abs(width) <= a <= right - 0.1 * abs(width)):
                a = lo + 0.5 * width
            f, g, d = evaluate(a)
            if not math.isfinite(f):
                hi, f_hi, d_hi = a, math.inf, 0.0
                continue
            if acceptable(a, f, d):
                return a, f, g
            if not armijo(a, f) or f >= f_lo:
                hi, f_hi, d_hi = a, f, d
            else:
                if d * (hi - lo) >= 0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo = a, f, d
            if abs(hi - lo) < 1e-16 * max(1.0, abs(lo)):
                break
        raise _LineSearchFailed

    a_prev, f_prev, d_prev = 0.0, f0, d0
    a = alpha1
    for i in range(cfg.max_line_search):
        f, g, d = evaluate(a)
        if not math.isfinite(f):
            a = 0.5 * (a_prev + a)
            continue
        if acceptable(a, f, d):
            return a, f, g
        if not armijo(a, f) or (i > 0 and f >= f_prev):
            return zoom(a_prev, f_prev, d_prev, a, f, d, cfg.max_line_search)
        if d >= 0:
            return zoom(a, f, d, a_prev, f_prev, d_prev, cfg.max_line_search)
        a_prev, f_prev, d_prev = a, f, d
        a = 2.0 * a
    raise _LineSearchFailed


def minimize(fg: FunGrad, x0, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizeResult:
    """Minimize a smooth function given ``fg(x) -> (f, grad)``.

    Raises :class:`OptimizerStalled` (carrying the best iterate) if the
    line search fails even along steepest descent.
    """
    x = np.array(x0, dtype=float).reshape(-1)
    counted = _Counter(fg)
    if cfg.check_gradient and x.size:
        check_gradient(fg, x)
    f, g = counted(x)
    n = x.size
    if n == 0:
        return OptimizeResult(x, f, g, True, 0, counted.n, "no free parameters")
    hinv = np.eye(n)
    fresh = True  # hinv has not been rescaled since the last reset
    it = 0
    while True:
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= cfg.grad_tol_inf:
            return OptimizeResult(x, f, g, True, it, counted.n, "gradient tolerance reached")
        if it >= cfg.max_iterations:
            return OptimizeResult(x, f, g, False, it, counted.n, "iteration limit reached")
        p = -hinv @ g
        if float(g @ p) >= 0:
            hinv, fresh, p = np.eye(n), True, -g
        alpha1 = min(1.0, 1.0 / max(gnorm, 1e-300)) if fresh else 1.0
        try:
            alpha, f_new, g_new = _line_search(counted, x, f, g, p, alpha1, cfg)
        except _LineSearchFailed:
            if not fresh:
                log.debug("line search failed at iteration %d; resetting curvature", it)
                hinv, fresh = np.eye(n), True
                it += 1
                continue
            best_f, best_x, best_g = counted.best
            if best_x is None or best_f > f:
                best_f, best_x, best_g = f, x, g
            raise OptimizerStalled(
                f"line search failed at iteration {it} (|grad|_inf = {gnorm:.3e})",
                best_x, best_f, float(np.max(np.abs(best_g))), it,
            )
        s = alpha * p
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-300:
            if fresh:
                hinv = np.eye(n) * (sy / float(y @ y))
                fresh = False
            rho = 1.0 / sy
            hy = hinv @ y
            hinv = (hinv - rho * (np.outer(s, hy) + np.outer(hy, s))
                    + (rho * rho * float(y @ hy) + rho) * np.outer(s, s))
        x = x + s
        f, g = f_new, g_new
        it += 1

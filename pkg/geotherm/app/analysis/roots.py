"""
Bracketing root finder (Brent's method) and grid sign-change scanning.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from geotherm.app.errors import RootNotBracketed
from geotherm.app.schemas import ROOT_RTOL

logger = logging.getLogger(__name__)


@dataclass
class RootResult:
    """
    Attributes:
        root: Best estimate of the root
        bracket: Final bracket, endpoints of opposite sign
        converged: Whether the tolerance was reached
        iterations: Iterations used
    """

    root: float
    bracket: Tuple[float, float]
    converged: bool
    iterations: int


def _interpolation(best, f_best, prev, f_prev, contra, f_contra, half) -> Tuple[float, float]:
    """Secant (two points) or inverse quadratic (three points) step, as p / q with p >= 0"""
    s = f_best / f_prev
    if prev == contra:
        p, q = 2.0 * half * s, 1.0 - s
    else:
        q = f_prev / f_contra
        r = f_best / f_contra
        p = s * (2.0 * half * q * (q - r) - (best - prev) * (r - 1.0))
        q = (q - 1.0) * (r - 1.0) * (s - 1.0)
    return (p, -q) if p > 0 else (-p, q)


def brentq(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rtol: float = ROOT_RTOL,
    xtol: float = 0.0,
    maxiter: int = 200,
) -> RootResult:
    """
    Root of f in [lo, hi] by Brent's method.

    `best` is the current estimate, `contra` the point of opposite sign that
    closes the bracket and `prev` the estimate before `best`. Interpolated
    steps are taken only while they shrink the bracket fast enough; otherwise
    the step is a bisection. The default rtol (Tolerances.root) refines to
    machine precision.

    Raises:
        RootNotBracketed: f(lo) and f(hi) have the same sign
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return RootResult(lo, (lo, lo), True, 0)
    if f_hi == 0:
        return RootResult(hi, (hi, hi), True, 0)
    if np.sign(f_lo) == np.sign(f_hi):
        raise RootNotBracketed(lo, hi, f_lo, f_hi)

    if abs(f_hi) <= abs(f_lo):
        best, f_best, contra, f_contra = hi, f_hi, lo, f_lo
    else:
        best, f_best, contra, f_contra = lo, f_lo, hi, f_hi
    prev, f_prev = contra, f_contra
    step = last_step = best - contra

    for iteration in range(maxiter):
        tol = 2.0 * rtol * abs(best) + xtol
        half = (contra - best) / 2.0
        if abs(half) <= tol or f_best == 0:
            return RootResult(best, (min(best, contra), max(best, contra)), True, iteration)

        bisect = True
        if abs(last_step) >= tol and abs(f_prev) > abs(f_best):
            p, q = _interpolation(best, f_best, prev, f_prev, contra, f_contra, half)
            if 2.0 * p < min(3.0 * half * q - abs(tol * q), abs(last_step * q)):
                last_step, step = step, p / q
                bisect = False
        if bisect:
            step = last_step = half

        prev, f_prev = best, f_best
        best += step if abs(step) > tol else math.copysign(tol, half)
        f_best = f(best)

        if np.sign(f_best) == np.sign(f_contra):
            contra, f_contra = prev, f_prev
            step = last_step = best - prev
        if abs(f_contra) < abs(f_best):
            prev, f_prev = best, f_best
            best, f_best = contra, f_contra
            contra, f_contra = prev, f_prev

    logger.warning(f"brentq did not converge in {maxiter} iterations near {best}")
    return RootResult(best, (min(best, contra), max(best, contra)), False, maxiter)


def sign_change_brackets(x: np.ndarray, values: np.ndarray) -> List[Tuple[float, float]]:
    """
    Grid cells [x_j, x_j+1] on which `values` changes sign.

    An exact zero on a grid node gives the degenerate bracket (x_j, x_j).
    Non-finite values break the scan locally.
    """
    brackets: List[Tuple[float, float]] = []
    signs = np.sign(values)
    finite = np.isfinite(values)
    for j in range(len(x)):
        if not finite[j]:
            continue
        if signs[j] == 0:
            brackets.append((float(x[j]), float(x[j])))
            continue
        if j + 1 < len(x) and finite[j + 1] and signs[j] * signs[j + 1] < 0:
            brackets.append((float(x[j]), float(x[j + 1])))
    return brackets

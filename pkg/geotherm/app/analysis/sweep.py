"""
Grid evaluation of a quantity along a one-dimensional sweep.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from geotherm.app.analysis.roots import sign_change_brackets
from geotherm.app.analysis.workspace import Expression, ThermoGeometry, geometry_for
from geotherm.app.errors import DomainError, PoleEvaluation
from geotherm.app.models import ThermoModel
from geotherm.app.schemas import SweepSpec, Tolerances
from geotherm.app.symbolic import RationalExpr

logger = logging.getLogger(__name__)


@dataclass
class SweepSeries:
    quantity: str
    x: np.ndarray
    values: Optional[np.ndarray]
    flags: np.ndarray

    @property
    def defined(self) -> bool:
        return self.values is not None


def sweep_grid(spec: SweepSpec) -> np.ndarray:
    lo, hi = spec.range
    if spec.scale == "log":
        return np.geomspace(lo, hi, spec.points)
    return np.linspace(lo, hi, spec.points)


def check_domain(model: ThermoModel, spec: SweepSpec):
    """
    Raises:
        DomainError: the active variable is not a model variable, or a fixed
            value is missing or non-positive
    """
    if spec.active_var not in model.vars:
        raise DomainError(f"sweep variable {spec.active_var!r} is not one of {model.vars}")
    if spec.range[0] <= 0:
        raise DomainError(f"sweep range must be positive, got {spec.range}")
    for v in model.vars:
        if v == spec.active_var:
            continue
        if v not in spec.fixed:
            raise DomainError(f"no fixed value for {v!r}")
        if not spec.fixed[v] > 0:
            raise DomainError(f"fixed value of {v!r} must be positive, got {spec.fixed[v]}")


def line_point(spec: SweepSpec, x) -> Dict[str, object]:
    point: Dict[str, object] = dict(spec.fixed)
    point[spec.active_var] = x
    return point


def evaluate_at(expr: Expression, spec: SweepSpec, x: float) -> float:
    """Scalar value on the sweep line; an exact pole gives inf"""
    try:
        return float(expr.evaluate(line_point(spec, x)))
    except PoleEvaluation:
        return float("inf")


def evaluate_line(expr: Expression, spec: SweepSpec, xs: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        values = expr.evaluate_many(line_point(spec, xs))
    return np.broadcast_to(np.asarray(values, dtype=float), xs.shape).copy()


def pole_flags(expr: Expression, spec: SweepSpec, xs: np.ndarray, pole_guard: float) -> np.ndarray:
    """Grid points next to a zero of any denominator factor"""
    flags = np.zeros(xs.shape, dtype=bool)
    if not isinstance(expr, RationalExpr):
        return flags
    for factor, _ in expr.factors:
        values = evaluate_line(factor, spec, xs)
        scale = np.nanmax(np.abs(values)) if np.any(np.isfinite(values)) else 0.0
        if scale > 0:
            flags |= np.abs(values) < pole_guard * scale
        for lo, hi in sign_change_brackets(xs, values):
            flags |= (xs == lo) | (xs == hi)
    return flags


def sweep(
    model: ThermoModel,
    quantity: str,
    spec: SweepSpec,
    tolerances: Optional[Tolerances] = None,
    geometry: Optional[ThermoGeometry] = None,
) -> SweepSeries:
    """
    Evaluate one quantity on the sweep grid.

    Raises:
        DomainError: non-positive coordinate or incomplete fixed point
    """
    tolerances = tolerances or Tolerances()
    geometry = geometry or geometry_for(model)
    check_domain(model, spec)

    xs = sweep_grid(spec)
    expr = geometry.expression(quantity)
    if expr is None:
        logger.info(f"{quantity} is not defined for this model; column left blank")
        return SweepSeries(quantity, xs, None, np.zeros(xs.shape, dtype=bool))

    values = evaluate_line(expr, spec, xs)
    flags = pole_flags(expr, spec, xs, tolerances.pole_guard)

    bad = ~np.isfinite(values)
    if np.any(bad):
        logger.warning(f"{quantity}: {int(bad.sum())} non-finite value(s) on the grid")
    logger.debug(f"{quantity}: {int(flags.sum())} flagged grid point(s)")
    return SweepSeries(quantity, xs, values, flags)

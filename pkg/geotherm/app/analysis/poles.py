"""
Pole finding on denominator factors and classification of the singularities.
"""

import logging
import math
from typing import List, Optional, Sequence, Union

import numpy as np

from geotherm.app.analysis.roots import brentq, sign_change_brackets
from geotherm.app.analysis.sweep import check_domain, evaluate_at, evaluate_line, sweep_grid
from geotherm.app.analysis.workspace import (
    HEAT_CAPACITY,
    Expression,
    LabelledFactor,
    ThermoGeometry,
    geometry_for,
)
from geotherm.app.models import ThermoModel
from geotherm.app.schemas import ROOT_RTOL, Evidence, SingularityRecord, SweepSpec, Tolerances
from geotherm.app.symbolic import GenPoly

logger = logging.getLogger(__name__)


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def relative_distance(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b))


def find_poles(
    factors: Sequence[Union[GenPoly, LabelledFactor]],
    spec: SweepSpec,
    source: str = "C_Q",
    match_tol: float = 1e-6,
    root_rtol: float = ROOT_RTOL,
) -> List[SingularityRecord]:
    """
    Zeros of denominator factors on the sweep line.

    Each factor is restricted to the line, scanned for sign changes on the
    grid and refined with Brent's method to `root_rtol`. Roots of different
    factors closer than `match_tol` (relative) are merged into one record.
    """
    xs = sweep_grid(spec)
    var = spec.active_var
    candidates = []
    for index, item in enumerate(factors):
        if isinstance(item, GenPoly):
            item = LabelledFactor(f"F{index}", item, 1)
        line = item.poly.substitute(spec.fixed)
        if line.is_constant:
            continue

        values = evaluate_line(line, spec, xs)
        for lo, hi in sign_change_brackets(xs, values):

            def along(t, line=line):
                return line.evaluate({var: t})

            result = brentq(along, lo, hi, rtol=root_rtol)
            root = result.root
            candidates.append((root, result.bracket, item, abs(along(root))))
            logger.debug(f"{source}: factor {item.label} vanishes at {var}={root!r}")

    candidates.sort(key=lambda c: c[0])
    records: List[SingularityRecord] = []
    group: list = []
    for cand in candidates:
        if group and relative_distance(cand[0], group[0][0]) > match_tol:
            records.append(_record(group, source))
            group = []
        group.append(cand)
    if group:
        records.append(_record(group, source))

    logger.info(f"{source}: {len(records)} pole(s) on {var} in {list(spec.range)}")
    return records


def _record(group, source: str) -> SingularityRecord:
    root, bracket, _, _ = group[0]
    labels, multiplicities = [], []
    for _, _, item, _ in group:
        if item.label not in labels:
            labels.append(item.label)
            multiplicities.append(item.multiplicity)
    evidence = Evidence(
        factors=labels,
        multiplicities=multiplicities,
        bracket=(float(bracket[0]), float(bracket[1])),
        residual=max(c[3] for c in group),
    )
    return SingularityRecord(location=float(root), source=source, evidence=evidence)


def growth_exponent(expr: Expression, spec: SweepSpec, x_star: float, offsets=(1e-3, 1e-5)) -> Optional[float]:
    """
    Local exponent p in |E| ~ |x - x*|^-p, from two approach distances on each side.
    """
    far, near = offsets
    estimates = []
    for side in (1.0, -1.0):
        v_far = abs(evaluate_at(expr, spec, x_star * (1 + side * far)))
        v_near = abs(evaluate_at(expr, spec, x_star * (1 + side * near)))
        if math.isfinite(v_far) and math.isfinite(v_near) and v_far > 0 and v_near > 0:
            estimates.append(math.log(v_near / v_far) / math.log(far / near))
    if not estimates:
        return None
    return float(np.mean(estimates))


def pole_dominance(expr: Expression, spec: SweepSpec, x_star: float, offset: float) -> Optional[float]:
    """min |E(x*(1 +- offset))| over the median |E| on the sweep grid"""
    values = np.abs(evaluate_line(expr, spec, sweep_grid(spec)))
    values = values[np.isfinite(values)]
    if values.size == 0:
        return None
    median = float(np.median(values))
    if median == 0:
        return None
    near = min(abs(evaluate_at(expr, spec, x_star * (1 + s * offset))) for s in (1.0, -1.0))
    return near / median


def heat_capacity_poles(geometry: ThermoGeometry, spec: SweepSpec, match_tol: float) -> List[float]:
    key = ("cq_poles", spec.model_dump_json(), match_tol)
    if key not in geometry.cache:
        if geometry.quantities.C_Q is None:
            geometry.cache[key] = []
        else:
            records = find_poles(geometry.labelled_factors("C_Q"), spec, "C_Q", match_tol)
            geometry.cache[key] = [r.location for r in records]
    return geometry.cache[key]


def _f_scale(geometry: ThermoGeometry, spec: SweepSpec) -> float:
    key = ("f_scale", spec.model_dump_json())
    if key not in geometry.cache:
        values = np.abs(evaluate_line(geometry.quantities.f, spec, sweep_grid(spec)))
        values = values[np.isfinite(values)]
        geometry.cache[key] = float(values.max()) if values.size else 0.0
    return geometry.cache[key]


def classify_singularity(
    model: ThermoModel,
    record: SingularityRecord,
    spec: SweepSpec,
    tolerances: Optional[Tolerances] = None,
    geometry: Optional[ThermoGeometry] = None,
) -> SingularityRecord:
    """
    Set the kind of a record from f, the heat-capacity poles and the local growth.

    metric_degeneracy: f vanishes at the location (relative to its sweep maximum)
    phase_transition:  otherwise, when a C_Q denominator factor vanishes there
    unclassified:      anything else, including removable singularities

    The dominance ratio is compared against `tolerances.dominance` and stored
    as `evidence.dominant`; it does not change the kind.
    """
    tolerances = tolerances or Tolerances()
    geometry = geometry or geometry_for(model)
    check_domain(model, spec)
    x_star = record.location

    f_value = evaluate_at(geometry.quantities.f, spec, x_star)
    f_scale = _f_scale(geometry, spec)
    f_small = f_scale == 0 or abs(f_value) < tolerances.f_zero * f_scale

    cq = heat_capacity_poles(geometry, spec, tolerances.match)
    cq_distance = min((relative_distance(x_star, p) for p in cq), default=None)
    at_cq = HEAT_CAPACITY in record.evidence.factors or (
        cq_distance is not None and cq_distance <= tolerances.match
    )

    expr = geometry.expression(record.source)
    growth = growth_exponent(expr, spec, x_star, tolerances.growth_offsets)
    removable = growth is not None and growth < tolerances.growth_threshold
    dominance = _finite_or_none(pole_dominance(expr, spec, x_star, tolerances.dominance_offset))
    dominant = None if dominance is None else dominance >= tolerances.dominance

    if removable:
        kind = "unclassified"
        logger.warning(
            f"{record.source} singularity at {spec.active_var}={x_star:.10g} looks removable "
            f"(growth exponent {growth:.3g})"
        )
    elif f_small:
        kind = "metric_degeneracy"
    elif at_cq:
        kind = "phase_transition"
    else:
        kind = "unclassified"

    evidence = record.evidence.model_copy(
        update={
            "f_value": _finite_or_none(f_value),
            "growth_exponent": _finite_or_none(growth),
            "removable": removable,
            "dominance": dominance,
            "dominant": dominant,
            "cq_distance": _finite_or_none(cq_distance),
        }
    )
    logger.info(f"{record.source} singularity at {spec.active_var}={x_star:.10g}: {kind}")
    return record.model_copy(update={"kind": kind, "evidence": evidence})

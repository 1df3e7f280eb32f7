"""
The heat-capacity / curvature coincidence report.
"""

import logging
from typing import List, Optional

from geotherm.app.analysis.poles import classify_singularity, find_poles, relative_distance
from geotherm.app.analysis.sweep import check_domain
from geotherm.app.analysis.workspace import ThermoGeometry, geometry_for
from geotherm.app.errors import DegenerateMetric
from geotherm.app.models import ThermoModel
from geotherm.app.schemas import (
    CURVATURE_SOURCES,
    MatchRecord,
    SingularityRecord,
    SweepSpec,
    Tolerances,
    TransitionReport,
    WeinholdDistance,
)

logger = logging.getLogger(__name__)


def classified_poles(
    model: ThermoModel,
    source: str,
    spec: SweepSpec,
    tolerances: Tolerances,
    geometry: ThermoGeometry,
) -> List[SingularityRecord]:
    if geometry.expression(source) is None:
        return []
    records = find_poles(geometry.labelled_factors(source), spec, source, tolerances.match, tolerances.root)
    return [classify_singularity(model, r, spec, tolerances, geometry) for r in records]


def dominance_notes(records: List[SingularityRecord], var: str, threshold: float) -> List[str]:
    notes = []
    for r in records:
        if r.physical and r.evidence.dominant is False:
            notes.append(
                f"{r.source} pole at {var}={r.location:.10g}: dominance {r.evidence.dominance:.3g} "
                f"below {threshold:.3g}"
            )
    return notes


def coincidence_report(
    model: ThermoModel,
    spec: SweepSpec,
    tolerances: Optional[Tolerances] = None,
    metric: str = "gtd",
    geometry: Optional[ThermoGeometry] = None,
) -> TransitionReport:
    """
    Match heat-capacity poles against curvature singularities of `metric`.

    The verdict passes iff every C_Q pole has a phase_transition singularity
    of the curvature within the match tolerance and no physical curvature
    singularity is left unmatched. Removable C_Q poles are listed with status
    `removable` and do not count against the verdict. Physical poles whose
    dominance ratio is below `tolerances.dominance` are reported in `notes`.
    Weinhold singularities are listed with their distance to the nearest C_Q
    pole.
    """
    tolerances = tolerances or Tolerances()
    geometry = geometry or geometry_for(model)
    check_domain(model, spec)
    if metric not in CURVATURE_SOURCES:
        raise ValueError(f"unknown metric {metric!r}")

    cq_records = classified_poles(model, "C_Q", spec, tolerances, geometry)
    r_source = CURVATURE_SOURCES[metric]
    r_records = classified_poles(model, r_source, spec, tolerances, geometry)
    if r_source == "R_w":
        w_records = r_records
        extra: List[SingularityRecord] = []
    else:
        try:
            w_records = classified_poles(model, "R_w", spec, tolerances, geometry)
        except DegenerateMetric as e:
            logger.warning(f"Weinhold curvature unavailable: {e}")
            w_records = []
        extra = w_records

    candidates = [r for r in r_records if r.kind == "phase_transition" and r.physical]
    matched_r = set()
    matching: List[MatchRecord] = []
    for cq in cq_records:
        if cq.evidence.removable:
            matching.append(MatchRecord(cq_location=cq.location, matched=False, status="removable"))
            continue
        best, best_distance = None, None
        for index, r in enumerate(candidates):
            d = relative_distance(cq.location, r.location)
            if best_distance is None or d < best_distance:
                best, best_distance = index, d
        matched = best_distance is not None and best_distance <= tolerances.match
        if matched:
            matched_r.add(best)
        matching.append(
            MatchRecord(
                cq_location=cq.location,
                r_location=candidates[best].location if best is not None else None,
                distance=best_distance,
                matched=matched,
                status="matched" if matched else "unmatched",
            )
        )

    unmatched = [
        r.location
        for r in r_records
        if r.physical and not any(r is candidates[i] for i in matched_r)
    ]

    cq_locations = [m.cq_location for m in matching if m.status != "removable"]
    weinhold = []
    for w in w_records:
        distances = [(relative_distance(w.location, c), c) for c in cq_locations]
        nearest = min(distances) if distances else None
        weinhold.append(
            WeinholdDistance(
                location=w.location,
                nearest_cq=nearest[1] if nearest else None,
                distance=nearest[0] if nearest else None,
            )
        )

    notes = dominance_notes(cq_records + r_records, spec.active_var, tolerances.dominance)
    for note in notes:
        logger.warning(note)
    passed = all(m.status != "unmatched" for m in matching) and not unmatched
    report = TransitionReport(
        model=model.summary(),
        sweep=spec,
        metric=metric,
        records=cq_records + r_records + extra,
        matching=matching,
        weinhold=weinhold,
        unmatched_physical=unmatched,
        notes=notes,
        verdict="pass" if passed else "fail",
    )
    logger.info(
        f"Coincidence ({metric}): {len(matching)} C_Q pole(s), {len(r_records)} {r_source} "
        f"singularit(ies), verdict {report.verdict}"
    )
    return report

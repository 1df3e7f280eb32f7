"""Sweeps, pole finding, singularity classification and coincidence reports."""

from geotherm.app.analysis.poles import (
    classify_singularity,
    find_poles,
    growth_exponent,
    heat_capacity_poles,
    pole_dominance,
    relative_distance,
)
from geotherm.app.analysis.report import classified_poles, coincidence_report
from geotherm.app.analysis.roots import RootResult, brentq, sign_change_brackets
from geotherm.app.analysis.sweep import (
    SweepSeries,
    check_domain,
    evaluate_at,
    evaluate_line,
    line_point,
    sweep,
    sweep_grid,
)
from geotherm.app.analysis.workspace import LabelledFactor, ThermoGeometry, geometry_for

__all__ = [
    "LabelledFactor",
    "RootResult",
    "SweepSeries",
    "ThermoGeometry",
    "brentq",
    "check_domain",
    "classified_poles",
    "classify_singularity",
    "coincidence_report",
    "evaluate_at",
    "evaluate_line",
    "find_poles",
    "geometry_for",
    "growth_exponent",
    "heat_capacity_poles",
    "line_point",
    "pole_dominance",
    "relative_distance",
    "sign_change_brackets",
    "sweep",
    "sweep_grid",
]

"""
Cross-module verification checks and the builtin suites.

Each check evaluates symbolic results against an independent numeric oracle
at seeded random points, so a suite is deterministic.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from geotherm.app.analysis import ThermoGeometry, coincidence_report, evaluate_line, sweep_grid
from geotherm.app.config import build_model, load_spec, parse_config
from geotherm.app.errors import DegenerateMetric, PoleEvaluation, StencilOutOfDomain
from geotherm.app.geometry import curvature_numeric_oracle
from geotherm.app.models import ThermoModel, first_law_residual, ruppeiner_metric, weinhold_metric
from geotherm.app.runner import EXIT_NUMERIC, EXIT_OK, EXIT_VERDICT, NUMERIC_ERRORS
from geotherm.app.schemas import CURVATURE_SOURCES, RunSpec, SweepSpec, Tolerances

logger = logging.getLogger(__name__)

SEED = 20231
SAMPLE_POINTS = 50
ORACLE_POINTS = 12
FD_STEP = 1e-5
# Relative factor magnitude kept between oracle points and denominator zeros
POLE_MARGIN = 1e-2

BUILTIN_SUITES: Dict[str, str] = {
    "rn": """
        # Reissner-Nordstrom-AdS, l = 8: two heat-capacity poles
        model.type = rn
        model.l = 8
        sweep.var = S
        sweep.min = 5
        sweep.max = 60
        fixed.Q = 1
        analysis.verify_coincidence = true
    """,
    "pmi-3-5/2": """
        # PMI n = 3, s = 5/2
        model.type = pmi
        model.n = 3
        model.s = 5/2
        model.l = 1
        sweep.var = S
        sweep.min = 0.5
        sweep.max = 5
        fixed.Q = 1
    """,
    "pmi-4-5/2": """
        # PMI n = 4, s = 5/2 with the coincidence verdict
        model.type = pmi
        model.n = 4
        model.s = 5/2
        model.l = 1
        sweep.var = S
        sweep.min = 0.5
        sweep.max = 10
        fixed.Q = 1
        analysis.verify_coincidence = true
    """,
    "pmi-6-5/2": """
        # PMI n = 6, s = 5/2: one curvature singularity is a zero of f
        model.type = pmi
        model.n = 6
        model.s = 5/2
        model.l = 1
        sweep.var = S
        sweep.min = 0.1
        sweep.max = 10
        fixed.Q = 1
    """,
    "pmi-4-5/2-l": """
        # PMI n = 4, s = 5/2 over (S, Q, l), sweeping l
        model.type = pmi
        model.n = 4
        model.s = 5/2
        model.l_is_variable = true
        sweep.var = l
        sweep.min = 0.5
        sweep.max = 5
        fixed.S = 10
        fixed.Q = 1
    """,
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: Optional[float] = None
    detail: str = ""


@dataclass
class VerifyResult:
    exit_code: int
    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    message: str = ""

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def table(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "check": c.name,
                    "status": "PASS" if c.passed else "FAIL",
                    "worst": "" if c.worst is None else f"{c.worst:.3e}",
                    "detail": c.detail,
                }
                for c in self.checks
            ],
            columns=["check", "status", "worst", "detail"],
        )


def resolve_suite(ref: str) -> RunSpec:
    """A builtin suite id, a config file or a preset name"""
    if ref in BUILTIN_SUITES:
        return parse_config(BUILTIN_SUITES[ref])
    return load_spec(ref)


def sample_points(model: ThermoModel, spec: SweepSpec, rng: np.random.Generator, count: int) -> List[Dict[str, float]]:
    """Random states around the sweep: the active variable over its range, fixed ones within 20%"""
    lo, hi = spec.range
    points = []
    for _ in range(count):
        point = {spec.active_var: float(rng.uniform(lo, hi))}
        for v in model.vars:
            if v != spec.active_var:
                point[v] = float(spec.fixed[v] * rng.uniform(0.8, 1.2))
        points.append(point)
    return points


def _shifted(point: Dict[str, float], var: str, delta: float) -> Dict[str, float]:
    shifted = dict(point)
    shifted[var] += delta
    return shifted


def check_derivatives(model: ThermoModel, points, tolerances: Tolerances) -> CheckResult:
    """dM/dE^a and d2M/dS2 against central differences"""
    m = model.potential
    T = m.diff(model.entropy_var)
    pairs = [(m, v, m.diff(v)) for v in model.vars] + [(T, model.entropy_var, T.diff(model.entropy_var))]

    worst = 0.0
    for point in points:
        for base, v, derivative in pairs:
            h = FD_STEP * point[v]
            numeric = (base.evaluate(_shifted(point, v, h)) - base.evaluate(_shifted(point, v, -h))) / (2 * h)
            symbolic = derivative.evaluate(point)
            scale = max(abs(symbolic), abs(base.evaluate(point)) / point[v], 1e-300)
            worst = max(worst, abs(symbolic - numeric) / scale)
    return CheckResult(
        "derivatives",
        worst <= tolerances.derivative_rel,
        worst,
        f"{len(points)} points, {len(pairs)} derivatives each",
    )


def _line_points(geometry: ThermoGeometry, quantity: str, spec: SweepSpec, rng: np.random.Generator) -> List[float]:
    """Sweep positions whose denominator factors stay clear of zero"""
    xs = sweep_grid(spec)
    candidates = rng.uniform(spec.range[0], spec.range[1], ORACLE_POINTS * 4)
    keep = np.ones(candidates.shape, dtype=bool)
    for factor in geometry.labelled_factors(quantity):
        scale = np.nanmax(np.abs(evaluate_line(factor.poly, spec, xs)))
        values = np.abs(evaluate_line(factor.poly, spec, candidates))
        keep &= values > POLE_MARGIN * scale
    return [float(x) for x in candidates[keep][:ORACLE_POINTS]]


def check_curvature_oracle(
    geometry: ThermoGeometry, metric: str, spec: SweepSpec, rng: np.random.Generator, tolerances: Tolerances
) -> CheckResult:
    name = f"curvature_oracle[{metric}]"
    quantity = CURVATURE_SOURCES[metric]
    try:
        scalar = geometry.expression(quantity)
    except DegenerateMetric as e:
        return CheckResult(name, True, None, f"skipped: {e}")

    g = geometry.metric(metric)
    worst, checked = 0.0, 0
    for x in _line_points(geometry, quantity, spec, rng):
        point = dict(spec.fixed)
        point[spec.active_var] = x
        try:
            numeric = curvature_numeric_oracle(g, point, tolerances.oracle_step)
            symbolic = scalar.evaluate(point)
        except (DegenerateMetric, StencilOutOfDomain, PoleEvaluation) as e:
            logger.debug(f"{name}: skipping {point}: {e}")
            continue
        checked += 1
        worst = max(worst, abs(symbolic - numeric) / max(abs(symbolic), 1.0))
    if checked == 0:
        return CheckResult(name, False, None, "no usable points")
    return CheckResult(name, worst <= tolerances.oracle_rel, worst, f"{checked} points")


def rn_closed_form(S: float, Q: float, l: float) -> float:
    """C_Q of Reissner-Nordstrom-AdS in closed form"""
    pi = math.pi
    num = 2 * S * (3 * S**2 + pi * S * l**2 - pi**2 * Q**2 * l**2)
    den = 3 * S**2 - pi * S * l**2 + 3 * pi**2 * Q**2 * l**2
    return num / den


def check_rn_closed_form(geometry: ThermoGeometry, points, tolerances: Tolerances) -> CheckResult:
    model = geometry.model
    cq = geometry.quantities.C_Q
    worst, checked = 0.0, 0
    for point in points:
        l = point.get("l", model.params.l)
        S, Q = point["S"], point["Q"]
        den_terms = 3 * S**2 + math.pi * S * l**2 + 3 * math.pi**2 * Q**2 * l**2
        den = 3 * S**2 - math.pi * S * l**2 + 3 * math.pi**2 * Q**2 * l**2
        if abs(den) < 1e-4 * den_terms:
            continue
        expected = rn_closed_form(S, Q, l)
        worst = max(worst, abs(cq.evaluate(point) - expected) / abs(expected))
        checked += 1
    return CheckResult("rn_closed_form", worst <= 1e-10, worst, f"{checked} points")


def check_gtd_cross_terms(geometry: ThermoGeometry) -> CheckResult:
    g = geometry.metric("gtd")
    nonzero = [f"g_{g.vars[0]}{v}" for b, v in enumerate(g.vars) if b > 0 and not g.is_structural_zero(0, b)]
    if nonzero:
        return CheckResult("gtd_cross_terms", False, None, f"nonzero: {', '.join(nonzero)}")
    return CheckResult("gtd_cross_terms", True, None, "entropy cross terms vanish")


def check_first_law(model: ThermoModel, points, tolerances: Tolerances) -> CheckResult:
    worst = 0.0
    pairs = list(zip(points[0::2], points[1::2]))
    for start, end in pairs:
        result = first_law_residual(model, start, end)
        worst = max(worst, result.residual / max(1.0, abs(result.delta_m)))
    return CheckResult("first_law", worst <= tolerances.closure, worst, f"{len(pairs)} paths")


def check_ruppeiner(model: ThermoModel, points, tolerances: Tolerances) -> CheckResult:
    """T g^R = g^W pointwise"""
    gw, gr = weinhold_metric(model), ruppeiner_metric(model)
    T = model.potential.diff(model.entropy_var)
    worst, checked = 0.0, 0
    for point in points:
        try:
            lhs = T.evaluate(point) * gr.evaluate(point)
        except DegenerateMetric:
            continue
        rhs = gw.evaluate(point)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))) / max(float(np.max(np.abs(rhs))), 1e-300))
        checked += 1
    return CheckResult("ruppeiner_proportionality", worst <= tolerances.proportionality, worst, f"{checked} points")


def check_coincidence(geometry: ThermoGeometry, spec: RunSpec) -> CheckResult:
    metric = spec.analysis.coincidence_metric
    report = coincidence_report(geometry.model, spec.sweep_spec(), spec.tolerances, metric, geometry)
    matched = sum(m.matched for m in report.matching)
    unmatched = len(report.unmatched_physical)
    detail = f"{matched}/{len(report.matching)} C_Q poles matched, {unmatched} unmatched ({metric})"
    if report.notes:
        detail += f", {len(report.notes)} low-dominance pole(s)"
    return CheckResult("coincidence", report.passed, None, detail)


def run_checks(spec: RunSpec) -> List[CheckResult]:
    model = build_model(spec.model)
    geometry = ThermoGeometry(model, eta_s=spec.model.eta_s)
    sweep_spec = spec.sweep_spec()
    tolerances = spec.tolerances
    rng = np.random.default_rng(SEED)
    points = sample_points(model, sweep_spec, rng, SAMPLE_POINTS)

    checks: List[Callable[[], CheckResult]] = [
        lambda: check_derivatives(model, points, tolerances),
        lambda: check_curvature_oracle(geometry, "gtd", sweep_spec, rng, tolerances),
        lambda: check_curvature_oracle(geometry, "weinhold", sweep_spec, rng, tolerances),
        lambda: check_gtd_cross_terms(geometry),
        lambda: check_first_law(model, points, tolerances),
        lambda: check_ruppeiner(model, points, tolerances),
    ]
    if model.dim <= 2:
        checks.insert(3, lambda: check_curvature_oracle(geometry, "ruppeiner", sweep_spec, rng, tolerances))
    if model.params is not None and model.params.n == 3 and model.params.i == 1:
        checks.insert(1, lambda: check_rn_closed_form(geometry, points, tolerances))
    if spec.analysis.verify_coincidence:
        checks.append(lambda: check_coincidence(geometry, spec))

    results = []
    for check in checks:
        result = check()
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, f"{result.name}: {'pass' if result.passed else 'FAIL'} {result.detail}")
        results.append(result)
    return results


def verify(ref: str) -> VerifyResult:
    """
    Run every check for a builtin suite, config file or preset.

    Returns:
        VerifyResult with exit code 0 when all checks pass, 3 on any failure
        and 2 on a numeric failure

    Raises:
        ConfigError: unknown suite or invalid config
    """
    spec = resolve_suite(ref)
    try:
        checks = run_checks(spec)
    except NUMERIC_ERRORS as e:
        logger.error(f"Numeric failure in suite {ref}: {e}")
        return VerifyResult(EXIT_NUMERIC, ref, [], str(e))

    result = VerifyResult(EXIT_OK, ref, checks)
    if result.failed:
        result.exit_code = EXIT_VERDICT
        result.message = f"failed: {', '.join(result.failed)}"
    else:
        result.message = f"all {len(checks)} checks passed"
    return result

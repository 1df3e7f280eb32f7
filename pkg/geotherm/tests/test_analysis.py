import math
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from pydantic import ValidationError

import geotherm.app.analysis.report as report_module
import geotherm.app.analysis.workspace as workspace
from geotherm.app.analysis import (
    ThermoGeometry,
    brentq,
    check_domain,
    classify_singularity,
    coincidence_report,
    find_poles,
    sign_change_brackets,
    sweep,
)
from geotherm.app.errors import DomainError, RootNotBracketed
from geotherm.app.models import build_custom_model, build_pmi_model, build_rn_model
from geotherm.app.schemas import SweepSpec, Tolerances
from geotherm.app.symbolic import GenPoly, poly_parse
from geotherm.tests.helpers import line


def runs(mask):
    """Number of contiguous True stretches"""
    padded = np.concatenate([[False], mask, [False]]).astype(int)
    return int(np.sum(np.diff(padded) == 1))


def rn_roots(l, Q=1.0):
    # 3 S^2 - pi l^2 S + 3 pi^2 Q^2 l^2 = 0
    return sorted(np.roots([3.0, -math.pi * l**2, 3 * math.pi**2 * Q**2 * l**2]).real)


def test_brentq():
    result = brentq(lambda x: x * x - 2, 0.0, 2.0)
    assert result.converged
    assert result.root == pytest.approx(math.sqrt(2), rel=1e-14)
    assert brentq(math.cos, 0.0, 2.0).root == pytest.approx(math.pi / 2, rel=1e-14)
    assert brentq(lambda x: x - 1, 1.0, 3.0).root == 1.0
    with pytest.raises(RootNotBracketed) as info:
        brentq(lambda x: x * x + 1, -1.0, 1.0)
    assert info.value.bracket == (-1.0, 1.0)


def test_brentq_tolerance():
    loose = brentq(lambda x: x * x - 2, 0.0, 2.0, rtol=1e-6)
    tight = brentq(lambda x: x * x - 2, 0.0, 2.0)
    assert loose.converged
    assert loose.root == pytest.approx(math.sqrt(2), rel=1e-5)
    assert loose.iterations <= tight.iterations
    lo, hi = loose.bracket
    assert (lo * lo - 2) * (hi * hi - 2) <= 0
    assert brentq(lambda x: x**3 - x - 1, 1.0, 2.0, maxiter=2).converged is False


def test_sign_change_brackets():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    assert sign_change_brackets(x, np.array([1.0, -1.0, -1.0, 0.0])) == [(0.0, 1.0), (3.0, 3.0)]
    assert sign_change_brackets(x, np.array([1.0, np.nan, -1.0, -2.0])) == []


def test_sweep_spec_validation():
    with pytest.raises(ValidationError):
        SweepSpec(active_var="S", range=(0.0, 1.0))
    with pytest.raises(ValidationError):
        SweepSpec(active_var="S", range=(2.0, 1.0))
    with pytest.raises(ValidationError):
        SweepSpec(active_var="S", range=(1.0, 2.0), fixed={"S": 1.0})
    with pytest.raises(ValidationError):
        SweepSpec(active_var="S", range=(1.0, 2.0), fixed={"Q": -1.0})


def test_domain_checks(pmi4_geometry):
    model = pmi4_geometry.model
    with pytest.raises(DomainError):
        check_domain(model, line("l", 0.5, 2.0, Q=1.0))
    with pytest.raises(DomainError):
        check_domain(model, line("S", 0.5, 2.0))


def test_sweep_values(pmi4_geometry):
    spec = line("S", 0.5, 10.0, Q=1.0)
    series = sweep(pmi4_geometry.model, "f", spec, geometry=pmi4_geometry)
    f = pmi4_geometry.quantities.f
    assert series.defined
    assert len(series.x) == 256
    for x, v in zip(series.x[::17], series.values[::17]):
        assert v == pytest.approx(f.evaluate({"S": x, "Q": 1.0}), rel=1e-12)
    assert not series.flags.any()


def test_undefined_quantity_is_blank(pmi4_geometry):
    series = sweep(pmi4_geometry.model, "L", line("S", 0.5, 10.0, Q=1.0), geometry=pmi4_geometry)
    assert not series.defined


def test_log_scale_grid(pmi4_geometry):
    spec = SweepSpec(active_var="S", range=(0.5, 50.0), points=64, scale="log", fixed={"Q": 1.0})
    series = sweep(pmi4_geometry.model, "T", spec, geometry=pmi4_geometry)
    ratios = series.x[1:] / series.x[:-1]
    assert np.allclose(ratios, ratios[0])


def test_heat_capacity_flags(rn_geometry):
    series = sweep(rn_geometry.model, "C_Q", line("S", 5.0, 60.0, Q=1.0), geometry=rn_geometry)
    assert runs(series.flags) == 2
    flagged = series.x[series.flags]
    low, high = rn_roots(8.0)
    assert flagged.min() < low < flagged.max()
    assert flagged.min() < high < flagged.max()


def test_heat_capacity_poles_match_quadratic(rn_geometry):
    spec = line("S", 5.0, 60.0, Q=1.0)
    records = find_poles(rn_geometry.labelled_factors("C_Q"), spec, "C_Q")
    assert [r.location for r in records] == pytest.approx(rn_roots(8.0), rel=1e-9)
    assert all(r.evidence.factors == ["heat_capacity"] for r in records)
    assert all(r.evidence.bracket[0] <= r.location <= r.evidence.bracket[1] for r in records)


def test_no_heat_capacity_poles_for_small_l():
    geometry = ThermoGeometry(build_rn_model(1.0))
    records = find_poles(geometry.labelled_factors("C_Q"), line("S", 0.1, 10.0, Q=1.0), "C_Q")
    assert records == []


def test_constant_factors_have_no_poles():
    spec = line("S", 0.5, 5.0, Q=2.0)
    assert find_poles([GenPoly.one()], spec) == []
    assert find_poles([poly_parse("Q - 1")], spec) == []


def test_pole_locations_are_grid_independent(rn_geometry):
    factors = rn_geometry.labelled_factors("C_Q")
    coarse = find_poles(factors, line("S", 5.0, 60.0, points=64, Q=1.0))
    fine = find_poles(factors, line("S", 5.0, 60.0, points=2048, Q=1.0))
    assert [r.location for r in coarse] == pytest.approx([r.location for r in fine], rel=1e-12)


def test_simple_pole_growth_and_dominance(rn_geometry):
    spec = line("S", 5.0, 60.0, Q=1.0)
    model = rn_geometry.model
    for record in find_poles(rn_geometry.labelled_factors("C_Q"), spec, "C_Q"):
        classified = classify_singularity(model, record, spec, Tolerances(), rn_geometry)
        assert classified.kind == "phase_transition"
        assert classified.evidence.growth_exponent == pytest.approx(1.0, abs=0.05)
        assert classified.evidence.dominance > 1e2
        assert not classified.evidence.removable


def test_rn_coincidence(rn_geometry):
    report = coincidence_report(rn_geometry.model, line("S", 5.0, 60.0, Q=1.0), geometry=rn_geometry)
    assert report.passed
    transitions = [r for r in report.by_source("R_gtd") if r.kind == "phase_transition"]
    assert len(transitions) == 2
    assert [m.cq_location for m in report.matching] == pytest.approx(rn_roots(8.0), rel=1e-9)
    assert all(m.matched and m.distance <= 1e-6 for m in report.matching)


def test_four_dimensional_coincidence(pmi4_geometry):
    report = coincidence_report(pmi4_geometry.model, line("S", 0.5, 10.0, Q=1.0), geometry=pmi4_geometry)
    assert report.passed
    (pole,) = report.by_source("C_Q")
    assert 2.0 < pole.location < 2.3
    assert report.matching[0].r_location == pytest.approx(pole.location, rel=1e-6)


def test_conformal_zero_is_a_metric_degeneracy(pmi6_geometry):
    report = coincidence_report(pmi6_geometry.model, line("S", 0.1, 10.0, Q=1.0), geometry=pmi6_geometry)
    kinds = {r.kind: r.location for r in report.by_source("R_gtd")}
    assert kinds["metric_degeneracy"] == pytest.approx(0.47, abs=0.02)
    assert kinds["phase_transition"] == pytest.approx(3.26, abs=0.02)
    degeneracy = next(r for r in report.by_source("R_gtd") if r.kind == "metric_degeneracy")
    assert "conformal" in degeneracy.evidence.factors
    assert degeneracy.location not in report.unmatched_physical
    assert report.passed


def test_three_variable_sweep_over_l(pmi4_l_geometry):
    spec = line("l", 0.5, 5.0, S=10.0, Q=1.0)
    report = coincidence_report(pmi4_l_geometry.model, spec, geometry=pmi4_l_geometry)
    kinds = {r.kind: r.location for r in report.by_source("R_gtd")}
    assert kinds["metric_degeneracy"] == pytest.approx(1.09, abs=0.02)
    assert kinds["phase_transition"] == pytest.approx(1.74, abs=0.02)
    assert report.passed


def test_weinhold_singularities_miss_the_heat_capacity_pole():
    model = build_pmi_model(4, s="5/2", l=1.0)
    geometry = ThermoGeometry(model)
    report = coincidence_report(model, line("S", 1.0, 20.0, Q=8.0), metric="weinhold", geometry=geometry)
    assert not report.passed
    assert any(p.location == pytest.approx(5.48, abs=0.02) for p in report.by_source("C_Q"))
    assert any(w.location == pytest.approx(6.76, abs=0.02) for w in report.weinhold)
    assert all(w.distance > 1e-3 for w in report.weinhold if w.distance is not None)


def test_constant_hessian_passes_vacuously(quadratic_geometry):
    report = coincidence_report(quadratic_geometry.model, line("S", 0.5, 5.0, Q=1.0), geometry=quadratic_geometry)
    assert quadratic_geometry.expression("R_w").is_zero
    assert report.matching == []
    assert report.records == []
    assert report.passed


def test_unknown_metric(quadratic_geometry):
    with pytest.raises(ValueError):
        coincidence_report(quadratic_geometry.model, line("S", 0.5, 5.0, Q=1.0), metric="bogus")


def test_root_tolerance_reaches_pole_refinement(rn_geometry):
    factors = rn_geometry.labelled_factors("C_Q")
    spec = line("S", 5.0, 60.0, Q=1.0)
    loose = find_poles(factors, spec, "C_Q", root_rtol=1e-9)
    assert [r.location for r in loose] == pytest.approx(rn_roots(8.0), rel=1e-8)
    report = coincidence_report(rn_geometry.model, spec, Tolerances(root=1e-9), geometry=rn_geometry)
    assert report.passed
    with pytest.raises(ValidationError):
        Tolerances(root=1e-3)


def test_dominance_flag_follows_threshold(rn_geometry):
    spec = line("S", 5.0, 60.0, Q=1.0)
    model = rn_geometry.model
    record = find_poles(rn_geometry.labelled_factors("C_Q"), spec, "C_Q")[0]
    classified = classify_singularity(model, record, spec, Tolerances(), rn_geometry)
    d = classified.evidence.dominance
    assert classified.evidence.dominant == (d >= 1e3)
    low = classify_singularity(model, record, spec, Tolerances(dominance=d / 2), rn_geometry)
    high = classify_singularity(model, record, spec, Tolerances(dominance=d * 2), rn_geometry)
    assert low.evidence.dominant is True
    assert high.evidence.dominant is False
    assert low.kind == high.kind == classified.kind


def test_low_dominance_poles_are_noted_not_failed(rn_geometry):
    spec = line("S", 5.0, 60.0, Q=1.0)
    report = coincidence_report(rn_geometry.model, spec, geometry=rn_geometry)
    weak = [
        r
        for r in report.records
        if r.source in ("C_Q", "R_gtd") and r.physical and r.evidence.dominant is False
    ]
    assert len(report.notes) == len(weak)
    assert report.passed

    strict = coincidence_report(rn_geometry.model, spec, Tolerances(dominance=1e30), geometry=rn_geometry)
    physical = [r for r in strict.records if r.source in ("C_Q", "R_gtd") and r.physical]
    assert len(strict.notes) == sum(r.evidence.dominance is not None for r in physical) >= 2
    assert any(note.startswith("C_Q pole at S=11.345") for note in strict.notes)
    assert strict.passed


def test_rn_heat_capacity_statuses(rn_geometry):
    report = coincidence_report(rn_geometry.model, line("S", 5.0, 60.0, Q=1.0), geometry=rn_geometry)
    assert [m.status for m in report.matching] == ["matched", "matched"]


def test_removable_heat_capacity_poles_are_listed(monkeypatch, rn_geometry):
    real = report_module.classify_singularity

    def removable_cq(model, record, spec, tolerances, geometry):
        classified = real(model, record, spec, tolerances, geometry)
        if classified.source != "C_Q":
            return classified
        evidence = classified.evidence.model_copy(update={"removable": True})
        return classified.model_copy(update={"evidence": evidence})

    monkeypatch.setattr(report_module, "classify_singularity", removable_cq)
    report = coincidence_report(rn_geometry.model, line("S", 5.0, 60.0, Q=1.0), geometry=rn_geometry)
    assert [m.status for m in report.matching] == ["removable", "removable"]
    assert not any(m.matched for m in report.matching)
    assert all(w.nearest_cq is None for w in report.weinhold)
    # the R_gtd transitions are left without a partner
    assert report.unmatched_physical
    assert not report.passed


def test_curvature_pole_order_at_heat_capacity_pole(rn_geometry):
    spec = line("S", 5.0, 60.0, Q=1.0)
    multiplicity = {f.label: f.multiplicity for f in rn_geometry.labelled_factors("R_gtd")}
    assert multiplicity["heat_capacity"] >= 2
    report = coincidence_report(rn_geometry.model, spec, geometry=rn_geometry)
    for r in report.by_source("R_gtd"):
        if r.kind == "phase_transition":
            assert "heat_capacity" in r.evidence.factors
            assert r.evidence.growth_exponent == pytest.approx(2.0, abs=0.1)


def test_ruppeiner_coincidence_report(rn_geometry):
    spec = line("S", 5.0, 60.0, Q=1.0)
    report = coincidence_report(rn_geometry.model, spec, metric="ruppeiner", geometry=rn_geometry)
    assert report.metric == "ruppeiner"
    assert {r.source for r in report.records} <= {"C_Q", "R_rupp", "R_w"}
    assert [m.cq_location for m in report.matching] == pytest.approx(rn_roots(8.0), rel=1e-9)
    assert all(m.status in ("matched", "unmatched") for m in report.matching)
    assert report.passed == (
        all(m.matched for m in report.matching) and not report.unmatched_physical
    )


def test_curvature_build_does_not_block_other_items(monkeypatch):
    geometry = ThermoGeometry(build_custom_model(["S", "Q"], "S^3 + S*Q^2"))
    started, release = threading.Event(), threading.Event()
    real = workspace.curvature_bundle
    builds = []

    def slow_bundle(metric):
        builds.append(metric)
        started.set()
        release.wait(10)
        return real(metric)

    monkeypatch.setattr(workspace, "curvature_bundle", slow_bundle)
    with ThreadPoolExecutor(max_workers=3) as pool:
        try:
            first = pool.submit(geometry.curvature, "gtd")
            assert started.wait(10)
            second = pool.submit(geometry.curvature, "gtd")
            # quantities and other metrics stay available during the build
            others = pool.submit(lambda: (geometry.quantities.T, geometry.metric("weinhold")))
            assert others.result(timeout=10)[1] is geometry.metric("weinhold")
            assert not first.done()
        finally:
            release.set()
        assert first.result(timeout=10) is second.result(timeout=10)
    assert len(builds) == 1
    assert geometry.curvature("gtd") is first.result()

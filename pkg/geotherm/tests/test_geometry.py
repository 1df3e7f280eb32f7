import numpy as np
import pytest

from geotherm.app.errors import DegenerateMetric, StencilOutOfDomain
from geotherm.app.geometry import (
    MetricField,
    curvature_bundle,
    curvature_numeric_oracle,
    curvature_scalar,
    metric_determinant,
    metric_from_components,
    metric_inverse,
    ricci_tensor,
    riemann_tensor,
)
from geotherm.app.symbolic import GenPoly, RationalExpr, poly_parse
from geotherm.tests.helpers import random_point, random_poly

S = GenPoly.variable("S")
Q = GenPoly.variable("Q")


def half_plane():
    inv_s2 = GenPoly.monomial(1, {"S": -2})
    return metric_from_components(("S", "Q"), [[inv_s2, 0], [0, inv_s2]], name="half-plane")


def evaluate_matrix(m, point):
    return np.array([[entry.evaluate(point) for entry in row] for row in m])


def test_inverse_of_diagonal_and_full_metrics():
    diag = metric_from_components(("S", "Q"), [[S, 0], [0, Q**2]])
    inv = metric_inverse(diag)
    assert inv[0][1].is_zero
    assert inv[0][0].evaluate({"S": 2.0, "Q": 3.0}) == pytest.approx(0.5)
    assert inv[1][1].evaluate({"S": 2.0, "Q": 3.0}) == pytest.approx(1 / 9)

    full = metric_from_components(("S", "Q"), [[S, Q], [Q, S**2 + 1]])
    point = {"S": 1.3, "Q": 0.7}
    expected = np.linalg.inv(full.evaluate(point))
    np.testing.assert_allclose(evaluate_matrix(metric_inverse(full), point), expected, rtol=1e-12)


def test_inverse_of_three_dimensional_metric(rng):
    l = GenPoly.variable("l")
    g = metric_from_components(
        ("S", "Q", "l"),
        [[S**2 + 2, Q, l], [Q, Q**2 + 3, S * l], [l, S * l, l**2 + 4]],
    )
    point = random_point(rng, ("S", "Q", "l"))
    product = g.evaluate(point) @ evaluate_matrix(metric_inverse(g), point)
    np.testing.assert_allclose(product, np.eye(3), atol=1e-12)


def test_half_plane_christoffel_symbols():
    bundle = curvature_bundle(half_plane())
    point = {"S": 2.0, "Q": 1.0}
    gamma = bundle.christoffel
    assert gamma[0][0][0].evaluate(point) == pytest.approx(-0.5)
    assert gamma[0][1][1].evaluate(point) == pytest.approx(0.5)
    assert gamma[1][0][1].evaluate(point) == pytest.approx(-0.5)
    assert gamma[1][1][0].evaluate(point) == pytest.approx(-0.5)
    assert gamma[1][0][0].is_zero


def test_two_dimensional_ricci_is_half_the_scalar_times_g():
    g = half_plane()
    ricci = ricci_tensor(g)
    point = {"S": 2.0, "Q": 1.0}
    assert curvature_scalar(g).evaluate(point) == pytest.approx(-2.0, rel=1e-12)
    np.testing.assert_allclose(evaluate_matrix(ricci, point), -g.evaluate(point), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("point", [{"S": 0.5, "Q": 1.0}, {"S": 2.0, "Q": 7.0}, {"S": 40.0, "Q": 0.1}])
def test_half_plane_has_constant_negative_curvature(point):
    R = curvature_bundle(half_plane()).scalar
    assert abs(R.evaluate(point) + 2.0) <= 1e-9


def test_constant_metric_is_flat():
    g = metric_from_components(("S", "Q"), [[3, 1], [1, 2]])
    assert curvature_bundle(g).scalar.is_zero
    assert curvature_numeric_oracle(g, {"S": 1.0, "Q": 1.0}) == pytest.approx(0.0, abs=1e-6)


def test_conformally_flat_metric_against_oracle():
    g = MetricField(("S", "Q"), ((-2, 0), (0, 2)), conformal=poly_parse("2*S^2 + 2*Q^2"))
    point = {"S": 2.0, "Q": 1.0}
    symbolic = curvature_bundle(g).scalar.evaluate(point)
    assert symbolic != pytest.approx(0.0, abs=1e-6)
    assert curvature_numeric_oracle(g, point) == pytest.approx(symbolic, rel=1e-4)


def test_oracle_on_half_plane():
    assert curvature_numeric_oracle(half_plane(), {"S": 3.0, "Q": 1.0}) == pytest.approx(-2.0, abs=1e-4)


def random_metric(rng, variables):
    n = len(variables)
    rows = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            if n == 3 and b == 2 and a < 2:
                entry = GenPoly.zero()
            else:
                entry = random_poly(rng, variables=variables, max_terms=2)
            if a == b:
                entry = entry + float(rng.integers(2, 6))
            rows[a][b] = rows[b][a] = entry
    return metric_from_components(variables, rows, name="random")


def test_random_metrics_against_oracle(rng):
    checked = 0
    for k in range(50):
        variables = ("S", "Q", "l") if k % 5 == 4 else ("S", "Q")
        g = random_metric(rng, variables)
        point = random_point(rng, variables, lo=0.8, hi=2.5)
        if np.linalg.cond(g.evaluate(point)) > 1e3:
            continue
        try:
            R = curvature_bundle(g).scalar
        except DegenerateMetric:
            continue
        symbolic = R.evaluate(point)
        numeric = curvature_numeric_oracle(g, point)
        assert abs(symbolic - numeric) <= 1e-3 * max(abs(symbolic), 1.0)
        checked += 1
    assert checked >= 30


def test_two_dimensional_riemann_identity(rng):
    g = metric_from_components(("S", "Q"), [[S**2 + Q, S], [S, Q**2 + 2]])
    riemann = riemann_tensor(g)
    R = curvature_bundle(g).scalar
    for _ in range(10):
        point = random_point(rng)
        m = g.evaluate(point)
        # R_SQSQ = g_Se R^e_QSQ
        lowered = sum(m[0, e] * riemann[e][1][0][1].evaluate(point) for e in range(2))
        det = metric_determinant(g).evaluate(point)
        assert det == pytest.approx(np.linalg.det(m), rel=1e-10)
        assert R.evaluate(point) * det == pytest.approx(2 * lowered, rel=1e-8, abs=1e-10)


def test_christoffel_and_ricci_symmetry():
    g = metric_from_components(("S", "Q"), [[S**2 + Q, S * Q], [S * Q, Q**3 + S]])
    bundle = curvature_bundle(g)
    point = {"S": 1.4, "Q": 0.9}
    for a in range(2):
        assert bundle.christoffel[a][0][1].evaluate(point) == bundle.christoffel[a][1][0].evaluate(point)
    assert bundle.ricci[0][1].evaluate(point) == bundle.ricci[1][0].evaluate(point)


def test_degenerate_metrics():
    with pytest.raises(DegenerateMetric):
        metric_inverse(metric_from_components(("S", "Q"), [[S, S], [S, S]]))

    g = metric_from_components(("S", "Q"), [[S, Q], [Q, S]])
    with pytest.raises(DegenerateMetric):
        curvature_numeric_oracle(g, {"S": 1.0, "Q": 1.0})

    pole = metric_from_components(("S", "Q"), [[RationalExpr(GenPoly.one(), S - Q), 0], [0, 1]])
    with pytest.raises(DegenerateMetric):
        pole.evaluate({"S": 1.0, "Q": 1.0})


def test_stencil_must_stay_positive():
    with pytest.raises(StencilOutOfDomain):
        curvature_numeric_oracle(half_plane(), {"S": 1.0, "Q": 1.0}, step=1.5)
    with pytest.raises(StencilOutOfDomain):
        curvature_numeric_oracle(half_plane(), {"S": -1.0, "Q": 1.0})


def test_scaling_covariance():
    m = poly_parse("S^(3/2)*Q^(-1/2) + Q^2*S^(1/2)")
    scaled = m.scale_variable("S", 2.0)

    def hessian_metric(p):
        return metric_from_components(
            ("S", "Q"),
            [[p.diff("S").diff("S"), p.diff("S").diff("Q")], [p.diff("Q").diff("S"), p.diff("Q").diff("Q")]],
        )

    R = curvature_bundle(hessian_metric(m)).scalar
    R_scaled = curvature_bundle(hessian_metric(scaled)).scalar
    for s, q in [(1.0, 0.5), (2.0, 1.5), (3.0, 0.8)]:
        # M'(S, Q) = M(2S, Q), so R'(S/2, Q) = R(S, Q)
        expected = R.evaluate({"S": s, "Q": q})
        assert R_scaled.evaluate({"S": s / 2, "Q": q}) == pytest.approx(expected, rel=1e-7, abs=1e-9)

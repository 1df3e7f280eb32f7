"""
Finite-difference curvature, independent of symbolic differentiation.

Only the metric components are evaluated (on a central stencil); derivatives
of g are taken numerically and the curvature assembled with numpy.
"""

import logging

import numpy as np

from geotherm.app.errors import DegenerateMetric, StencilOutOfDomain
from geotherm.app.geometry.metric import MetricField
from geotherm.app.symbolic import EvalPoint

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e13


def curvature_numeric_oracle(g: MetricField, x: EvalPoint, step: float = 1e-4) -> float:
    """
    Scalar curvature at x from central differences of the evaluated metric.

    Args:
        g: Metric field
        x: Point with a positive value for every metric variable
        step: Relative stencil step, h_a = step * x_a

    Returns:
        R at x

    Raises:
        DegenerateMetric: g is singular (or has a pole) at x
        StencilOutOfDomain: the stencil reaches a non-positive coordinate
    """
    n = g.dim
    x0 = np.array([float(x[v]) for v in g.vars])
    h = step * x0
    if np.any(x0 <= 0) or np.any(x0 - h <= 0):
        raise StencilOutOfDomain(f"stencil around {dict(x)} leaves the positive domain")

    def at(shift) -> np.ndarray:
        point = dict(x)
        for i, v in enumerate(g.vars):
            point[v] = x0[i] + shift[i] * h[i]
        return g.evaluate(point)

    unit = np.eye(n)
    g0 = at(np.zeros(n))
    if not np.all(np.isfinite(g0)) or np.linalg.cond(g0) > CONDITION_LIMIT:
        raise DegenerateMetric(f"{g.name} is numerically singular at {dict(x)}")
    ginv = np.linalg.inv(g0)

    plus = [at(unit[k]) for k in range(n)]
    minus = [at(-unit[k]) for k in range(n)]
    dg = np.array([(plus[k] - minus[k]) / (2 * h[k]) for k in range(n)])

    ddg = np.zeros((n, n, n, n))
    for k in range(n):
        ddg[k, k] = (plus[k] - 2 * g0 + minus[k]) / h[k] ** 2
        for m in range(k + 1, n):
            mixed = (
                at(unit[k] + unit[m])
                - at(unit[k] - unit[m])
                - at(-unit[k] + unit[m])
                + at(-unit[k] - unit[m])
            ) / (4 * h[k] * h[m])
            ddg[k, m] = mixed
            ddg[m, k] = mixed

    # first-kind symbols Gamma_dbc and their derivatives
    lowered = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg)
    dlowered = 0.5 * (
        np.einsum("ebdc->edbc", ddg) + np.einsum("ecdb->edbc", ddg) - ddg
    )
    dginv = -np.einsum("ij,ejk,kl->eil", ginv, dg, ginv)

    gamma = np.einsum("ad,dbc->abc", ginv, lowered)
    dgamma = np.einsum("ead,dbc->eabc", dginv, lowered) + np.einsum("ad,edbc->eabc", ginv, dlowered)

    ricci = (
        np.einsum("aabc->bc", dgamma)
        - np.einsum("baac->bc", dgamma)
        + np.einsum("aad,dbc->bc", gamma, gamma)
        - np.einsum("abd,dac->bc", gamma, gamma)
    )
    return float(np.einsum("bc,bc->", ginv, ricci))

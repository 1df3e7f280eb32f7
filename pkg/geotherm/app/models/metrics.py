"""
Weinhold, Ruppeiner and Legendre-invariant (GTD) metrics of a model.
"""

import logging
from typing import List

from geotherm.app.geometry import MetricField
from geotherm.app.models.thermo import ThermoModel, thermo_quantities
from geotherm.app.symbolic import GenPoly, RationalExpr
from geotherm.app.symbolic.rational import ONE

logger = logging.getLogger(__name__)


def hessian(model: ThermoModel) -> List[List[GenPoly]]:
    m = model.potential
    first = [m.diff(v) for v in model.vars]
    n = model.dim
    rows = [[GenPoly.zero()] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            rows[a][b] = rows[b][a] = first[a].diff(model.vars[b])
    return rows


def weinhold_metric(model: ThermoModel) -> MetricField:
    """g^W_ab = d2M / dE^a dE^b"""
    return MetricField(model.vars, hessian(model), None, "weinhold")


def ruppeiner_metric(model: ThermoModel) -> MetricField:
    """g^R = g^W / T, carried as a conformal factor 1/T"""
    T = thermo_quantities(model).T
    return MetricField(model.vars, hessian(model), ONE / RationalExpr(T), "ruppeiner")


def gtd_metric(model: ThermoModel, eta_s: int = -1) -> MetricField:
    """
    Pullback GTD metric f * (eta_ab d2M/dE^b dE^c), symmetrized.

    eta = diag(eta_s, 1, ..., 1). With eta_s = -1 every cross term between the
    entropy slot and another variable cancels.
    """
    if eta_s not in (-1, 1):
        raise ValueError(f"eta_s must be -1 or 1, got {eta_s}")
    eta = [eta_s] + [1] * (model.dim - 1)
    h = hessian(model)
    n = model.dim
    base = [[GenPoly.zero()] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            weight = (eta[a] + eta[b]) / 2
            if weight != 0:
                base[a][b] = base[b][a] = h[a][b].scale(weight)

    f = thermo_quantities(model).f
    return MetricField(model.vars, base, RationalExpr(f), "gtd")


METRIC_BUILDERS = {
    "gtd": gtd_metric,
    "weinhold": weinhold_metric,
    "ruppeiner": ruppeiner_metric,
}

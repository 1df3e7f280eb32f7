"""
Per-model cache of symbolic quantities, metrics and curvatures.

Several sweeps of one run share a ThermoGeometry, so each curvature is
computed once. Each item is built under its own lock, so a long curvature
build does not block sweeps of quantities already cached. Cached expressions are
immutable and safe to evaluate from several threads.
"""

import logging
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Union

from geotherm.app.geometry import CurvatureBundle, MetricField, curvature_bundle
from geotherm.app.models import METRIC_BUILDERS, ThermoModel, ThermoQuantities, thermo_quantities
from geotherm.app.models.metrics import gtd_metric
from geotherm.app.schemas import CURVATURE_SOURCES, QUANTITIES
from geotherm.app.symbolic import GenPoly, RationalExpr, normalize_factor

logger = logging.getLogger(__name__)

Expression = Union[GenPoly, RationalExpr]

CONFORMAL = "conformal"
HEAT_CAPACITY = "heat_capacity"


@dataclass(frozen=True, eq=False)
class LabelledFactor:
    label: str
    poly: GenPoly
    multiplicity: int = 1


class ThermoGeometry:
    def __init__(self, model: ThermoModel, eta_s: int = -1):
        self.model = model
        self.eta_s = eta_s
        self._lock = threading.Lock()
        self._build_locks: Dict[tuple, threading.Lock] = {}
        self._quantities: Optional[ThermoQuantities] = None
        self._metrics: Dict[str, MetricField] = {}
        self._curvatures: Dict[str, CurvatureBundle] = {}
        self.cache: Dict[tuple, object] = {}

    def _build_lock(self, key: tuple) -> threading.Lock:
        with self._lock:
            return self._build_locks.setdefault(key, threading.Lock())

    @property
    def quantities(self) -> ThermoQuantities:
        if self._quantities is None:
            with self._build_lock(("quantities",)):
                if self._quantities is None:
                    self._quantities = thermo_quantities(self.model)
        return self._quantities

    def metric(self, name: str) -> MetricField:
        if name not in self._metrics:
            with self._build_lock(("metric", name)):
                if name not in self._metrics:
                    if name == "gtd":
                        g = gtd_metric(self.model, eta_s=self.eta_s)
                    else:
                        g = METRIC_BUILDERS[name](self.model)
                    with self._lock:
                        self._metrics[name] = g
        return self._metrics[name]

    def curvature(self, name: str) -> CurvatureBundle:
        if name not in self._curvatures:
            with self._build_lock(("curvature", name)):
                if name not in self._curvatures:
                    logger.info(f"Computing {name} curvature for {self.model.mode} model")
                    bundle = curvature_bundle(self.metric(name))
                    with self._lock:
                        self._curvatures[name] = bundle
        return self._curvatures[name]

    def expression(self, quantity: str) -> Optional[Expression]:
        """Symbolic form of a quantity; None when the model does not define it"""
        if quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {quantity!r}")
        q = self.quantities
        if quantity == "T":
            return q.T
        if quantity == "Phi_e":
            return q.Phi_e
        if quantity == "L":
            return q.L
        if quantity == "C_Q":
            return q.C_Q
        if quantity == "f":
            return q.f
        metric = {source: name for name, source in CURVATURE_SOURCES.items()}[quantity]
        return self.curvature(metric).scalar

    def _primitive(self, p: Optional[GenPoly]) -> Optional[GenPoly]:
        if p is None or p.is_zero:
            return None
        _, primitive = normalize_factor(p)
        return None if primitive.is_one() else primitive

    def factor_label(self, factor: GenPoly, index: int) -> str:
        if factor == self._primitive(self.quantities.f):
            return CONFORMAL
        cq = self.quantities.C_Q
        if cq is not None and any(factor == f for f, _ in cq.factors):
            return HEAT_CAPACITY
        return f"F{index}"

    def labelled_factors(self, quantity: str) -> List[LabelledFactor]:
        """Denominator factors of a rational quantity, labelled for reports"""
        expr = self.expression(quantity)
        if not isinstance(expr, RationalExpr):
            return []
        return [
            LabelledFactor(self.factor_label(f, i), f, m)
            for i, (f, m) in enumerate(expr.factors)
        ]


@lru_cache(maxsize=32)
def geometry_for(model: ThermoModel, eta_s: int = -1) -> ThermoGeometry:
    return ThermoGeometry(model, eta_s)

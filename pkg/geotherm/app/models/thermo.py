"""
Thermodynamic models and the quantities derived from their potential.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from geotherm.app.errors import DivisionByZeroExpression, DomainError, InvalidParameter
from geotherm.app.symbolic import GenPoly, RationalExpr, VarId, poly_parse

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PMIParameters:
    """Parameters of a power-Maxwell black hole; s is stored as i = 2s - 1"""

    n: int
    i: int
    l: Optional[float]
    omega: float

    @property
    def s(self) -> Fraction:
        return Fraction(self.i + 1, 2)

    def as_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "s": str(self.s),
            "i": self.i,
            "l": self.l,
            "omega": self.omega,
        }


@dataclass(frozen=True, eq=False)
class ThermoModel:
    """
    A fundamental equation M(E^a) over an ordered variable list.

    The first variable is the entropy slot. For power-Maxwell models the
    variables are (S, Q) or (S, Q, l).
    """

    vars: Tuple[VarId, ...]
    potential: GenPoly
    kind: str = "custom"
    params: Optional[PMIParameters] = None

    @property
    def entropy_var(self) -> VarId:
        return self.vars[0]

    @property
    def charge_var(self) -> Optional[VarId]:
        return self.vars[1] if len(self.vars) > 1 else None

    @property
    def l_var(self) -> Optional[VarId]:
        return self.vars[2] if len(self.vars) > 2 else None

    @property
    def mode(self) -> str:
        if self.kind != "pmi":
            return "custom"
        return "S,Q,l" if self.l_var else "S,Q"

    @property
    def dim(self) -> int:
        return len(self.vars)

    def summary(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "mode": self.mode,
            "variables": list(self.vars),
            "params": self.params.as_dict() if self.params else {},
            "potential": self.potential.display(),
        }


@dataclass(frozen=True, eq=False)
class ThermoQuantities:
    T: GenPoly
    Phi_e: Optional[GenPoly]
    L: Optional[GenPoly]
    C_Q: Optional[RationalExpr]
    f: GenPoly


def build_custom_model(vars: Sequence[VarId], potential_text: str) -> ThermoModel:
    """
    Model from a user-supplied fundamental equation.

    Raises:
        ExpressionSyntaxError: potential does not parse
        UnknownVariable: potential uses an undeclared variable
        InvalidParameter: bad variable list
    """
    vars = tuple(vars)
    if not 1 <= len(vars) <= 3:
        raise InvalidParameter(f"custom models need 1 to 3 variables, got {len(vars)}")
    if len(set(vars)) != len(vars) or not all(vars):
        raise InvalidParameter(f"variables must be nonempty and unique, got {vars}")

    potential = poly_parse(potential_text, vars)
    logger.info(f"Built custom model over {vars}: M = {potential.display()}")
    return ThermoModel(vars, potential, "custom", None)


def thermo_quantities(model: ThermoModel) -> ThermoQuantities:
    m = model.potential
    s = model.entropy_var
    T = m.diff(s)
    Phi_e = m.diff(model.charge_var) if model.charge_var else None
    L = m.diff(model.l_var) if model.l_var else None

    try:
        C_Q = RationalExpr(T, T.diff(s))
    except DivisionByZeroExpression:
        logger.warning(f"d2M/d{s}2 vanishes identically; heat capacity undefined")
        C_Q = None

    f = GenPoly.zero()
    for v in model.vars:
        f = f + GenPoly.variable(v) * m.diff(v)
    return ThermoQuantities(T=T, Phi_e=Phi_e, L=L, C_Q=C_Q, f=f)


def intensive_variables(model: ThermoModel) -> Tuple[GenPoly, ...]:
    """I_a = dM/dE^a in variable order"""
    return tuple(model.potential.diff(v) for v in model.vars)


@dataclass(frozen=True)
class FirstLawResult:
    integral: float
    delta_m: float

    @property
    def residual(self) -> float:
        return abs(self.integral - self.delta_m)


def first_law_residual(
    model: ThermoModel,
    start: Mapping[VarId, float],
    end: Mapping[VarId, float],
    nodes: int = 32,
) -> FirstLawResult:
    """
    Integral of sum_a I_a dE^a along the straight path start -> end, with delta M.

    Uses Gauss-Legendre quadrature on the path parameter t in [0, 1].
    """
    for point in (start, end):
        for v in model.vars:
            if not point[v] > 0:
                raise DomainError(f"{v} must be positive on the path, got {point[v]}")

    u, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (u + 1.0)
    weights = 0.5 * w

    path = {v: start[v] + t * (end[v] - start[v]) for v in model.vars}
    integrand = np.zeros_like(t)
    for v, intensive in zip(model.vars, intensive_variables(model)):
        integrand += intensive.evaluate_many(path) * (end[v] - start[v])

    integral = float(np.dot(weights, integrand))
    delta_m = model.potential.evaluate(end) - model.potential.evaluate(start)
    return FirstLawResult(integral=integral, delta_m=delta_m)

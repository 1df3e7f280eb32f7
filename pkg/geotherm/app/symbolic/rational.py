"""
Quotients of generalized polynomials.

The denominator is kept as a multiset of normalized GenPoly factors rather
than one expanded polynomial. Normalized means the factor's leading monomial
has been divided out (and moved to the numerator), so two factors that agree
up to a monomial multiple are stored once. Quotients are never reduced
through a GCD; equality questions are answered numerically.
"""

import logging
from functools import cached_property, lru_cache
from numbers import Real
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from geotherm.app.errors import DivisionByZeroExpression, PoleEvaluation
from geotherm.app.symbolic.poly import EvalPoint, GenPoly, VarId

logger = logging.getLogger(__name__)

Factors = Tuple[Tuple[GenPoly, int], ...]


def normalize_factor(p: GenPoly) -> Tuple[GenPoly, GenPoly]:
    """
    Split p into (leading monomial, primitive part) with p = lead * primitive.

    The primitive part has constant term exactly 1 in the leading slot.
    """
    if p.is_zero:
        raise DivisionByZeroExpression("cannot normalize the zero polynomial")
    lead = p.leading_term()
    return lead, p.divide_by_monomial(lead)


@lru_cache(maxsize=4096)
def _factor_power(factor: GenPoly, m: int) -> GenPoly:
    return factor**m


def _expand(factors: Mapping[GenPoly, int]) -> GenPoly:
    result = GenPoly.one()
    for factor, m in factors.items():
        if m:
            result = result * _factor_power(factor, m)
    return result


def _ordered(factors: Mapping[GenPoly, int]) -> Factors:
    items = [(f, m) for f, m in factors.items() if m > 0]
    items.sort(key=lambda item: item[0].sort_key())
    return tuple(items)


class RationalExpr:
    """num / prod(F_i ** m_i), immutable"""

    def __init__(self, num, den=None):
        num = _as_poly(num)
        if den is None:
            self.num = num
            self.factors: Factors = ()
            return
        den = _as_poly(den)
        if den.is_zero:
            raise DivisionByZeroExpression("denominator is the zero polynomial")
        lead, primitive = normalize_factor(den)
        self.num = num.divide_by_monomial(lead)
        self.factors = () if primitive.is_one() else ((primitive, 1),)

    @classmethod
    def _make(cls, num: GenPoly, factors: Mapping[GenPoly, int]) -> "RationalExpr":
        expr = cls.__new__(cls)
        expr.num = num
        expr.factors = () if num.is_zero else _ordered(factors)
        return expr

    # Inspection

    @cached_property
    def den(self) -> GenPoly:
        return _expand(dict(self.factors))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return not self.factors

    def depends_on(self, var: VarId) -> bool:
        return self.num.depends_on(var) or any(f.depends_on(var) for f, _ in self.factors)

    # Arithmetic

    def __add__(self, other) -> "RationalExpr":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return rational_sum((self, other))

    __radd__ = __add__

    def __neg__(self) -> "RationalExpr":
        return RationalExpr._make(-self.num, dict(self.factors))

    def __sub__(self, other) -> "RationalExpr":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return rational_sum((self, -other))

    def __rsub__(self, other) -> "RationalExpr":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return rational_sum((other, -self))

    def __mul__(self, other) -> "RationalExpr":
        if isinstance(other, Real) and not isinstance(other, bool):
            return RationalExpr._make(self.num.scale(float(other)), dict(self.factors))
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return ZERO
        factors = dict(self.factors)
        for f, m in other.factors:
            factors[f] = factors.get(f, 0) + m
        return RationalExpr._make(self.num * other.num, factors)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalExpr":
        if isinstance(other, Real) and not isinstance(other, bool):
            if other == 0:
                raise DivisionByZeroExpression("division by the number zero")
            return RationalExpr._make(self.num.scale(1.0 / float(other)), dict(self.factors))
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZeroExpression("divisor is the zero polynomial")
        if self.is_zero:
            return ZERO

        lead, primitive = normalize_factor(other.num)
        den = dict(self.factors)
        if not primitive.is_one():
            den[primitive] = den.get(primitive, 0) + 1

        # divisor's own denominator moves up; cancel against ours first
        up: Dict[GenPoly, int] = {}
        for f, m in other.factors:
            shared = min(m, den.get(f, 0))
            if shared:
                den[f] -= shared
            if m - shared:
                up[f] = m - shared
        num = (self.num * _expand(up)).divide_by_monomial(lead)
        return RationalExpr._make(num, den)

    def __rtruediv__(self, other) -> "RationalExpr":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, k: int) -> "RationalExpr":
        if not isinstance(k, int):
            raise ValueError(f"only integer powers are supported, got {k!r}")
        if k < 0:
            return ONE / (self ** (-k))
        factors = {f: m * k for f, m in self.factors}
        return RationalExpr._make(self.num**k, factors)

    # Calculus

    def diff(self, var: VarId) -> "RationalExpr":
        """
        Quotient rule in logarithmic form.

        With N / prod F_i^m_i and D the factors depending on v,
        d/dv = (N' prod_D F_i - N sum_D m_i F_i' prod_{D, j != i} F_j) / (prod F^m * prod_D F_i)
        """
        dependent = [(f, m) for f, m in self.factors if f.depends_on(var)]
        num_diff = self.num.diff(var)
        if not dependent:
            return RationalExpr._make(num_diff, dict(self.factors))

        numerator = num_diff * _expand({f: 1 for f, _ in dependent})
        for i, (fi, mi) in enumerate(dependent):
            others = _expand({f: 1 for j, (f, _) in enumerate(dependent) if j != i})
            numerator = numerator - (self.num * fi.diff(var) * others).scale(float(mi))

        factors = dict(self.factors)
        for f, _ in dependent:
            factors[f] += 1
        return RationalExpr._make(numerator, factors)

    # Evaluation

    def evaluate(self, point: EvalPoint) -> float:
        n = self.num.evaluate(point)
        d = 1.0
        for f, m in self.factors:
            d *= f.evaluate(point) ** m
        if d == 0.0:
            raise PoleEvaluation("denominator vanishes at the evaluation point")
        return n / d

    def evaluate_many(self, point: Mapping[VarId, object]) -> np.ndarray:
        n = self.num.evaluate_many(point)
        d = np.ones_like(n)
        for f, m in self.factors:
            d = d * f.evaluate_many(point) ** m
        with np.errstate(divide="ignore", invalid="ignore"):
            return n / d

    def scale_variable(self, var: VarId, factor: float) -> "RationalExpr":
        """Replace v by factor * v, renormalizing the denominator factors"""
        result = RationalExpr(self.num.scale_variable(var, factor))
        for f, m in self.factors:
            result = result / RationalExpr(f.scale_variable(var, factor)) ** m
        return result

    def display(self) -> str:
        num = self.num.display()
        if not self.factors:
            return num
        parts = []
        for f, m in self.factors:
            parts.append(f"({f.display()})" if m == 1 else f"({f.display()})^{m}")
        return f"({num}) / ({'*'.join(parts)})"

    def __str__(self) -> str:
        return self.display()

    def __repr__(self) -> str:
        return f"RationalExpr({self.display()!r})"


def _as_poly(value) -> GenPoly:
    if isinstance(value, GenPoly):
        return value
    if isinstance(value, Real) and not isinstance(value, bool):
        return GenPoly.constant(float(value))
    raise TypeError(f"expected GenPoly or number, got {type(value).__name__}")


def _coerce(value) -> Optional[RationalExpr]:
    if isinstance(value, RationalExpr):
        return value
    if isinstance(value, GenPoly):
        return RationalExpr(value)
    if isinstance(value, Real) and not isinstance(value, bool):
        return RationalExpr(GenPoly.constant(float(value)))
    return None


def lift(value) -> RationalExpr:
    """GenPoly, number or RationalExpr as a RationalExpr"""
    expr = _coerce(value)
    if expr is None:
        raise TypeError(f"cannot lift {type(value).__name__} to RationalExpr")
    return expr


def rational_sum(terms: Iterable[RationalExpr]) -> RationalExpr:
    """Sum over the least common multiple of the factor multisets"""
    live: List[RationalExpr] = [lift(t) for t in terms]
    live = [t for t in live if not t.is_zero]
    if not live:
        return ZERO
    if len(live) == 1:
        return live[0]

    lcm: Dict[GenPoly, int] = {}
    for t in live:
        for f, m in t.factors:
            if m > lcm.get(f, 0):
                lcm[f] = m

    num = GenPoly.zero()
    for t in live:
        own = dict(t.factors)
        missing = {f: m - own.get(f, 0) for f, m in lcm.items() if m > own.get(f, 0)}
        num = num + t.num * _expand(missing)
    return RationalExpr._make(num, lcm)


ZERO = RationalExpr(GenPoly.zero())
ONE = RationalExpr(GenPoly.one())


# Functional forms


def rat_arith(a: RationalExpr, b: RationalExpr, op: str) -> RationalExpr:
    if op == "+":
        return lift(a) + lift(b)
    if op in ("*", "×"):
        return lift(a) * lift(b)
    if op in ("/", "÷"):
        return lift(a) / lift(b)
    raise ValueError(f"unsupported operator {op!r}")


def rat_diff(r: RationalExpr, v: VarId) -> RationalExpr:
    return lift(r).diff(v)

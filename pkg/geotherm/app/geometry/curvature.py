"""
Symbolic curvature of a MetricField.

Conventions:
    Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)
    R^a_bcd    = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
    Ric_bc     = R^a_bac
    R          = g^bc Ric_bc

With these signs the Poincare half-plane has R = -2.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from geotherm.app.errors import DegenerateMetric
from geotherm.app.geometry.metric import Matrix, MetricField
from geotherm.app.symbolic import GenPoly, RationalExpr, rational_sum
from geotherm.app.symbolic.rational import ONE, ZERO

logger = logging.getLogger(__name__)

Christoffel = Tuple[Tuple[Tuple[RationalExpr, ...], ...], ...]
Riemann = Tuple[Tuple[Tuple[Tuple[RationalExpr, ...], ...], ...], ...]


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    vars: Tuple[str, ...]
    inverse: Matrix
    christoffel: Christoffel
    ricci: Matrix
    scalar: RationalExpr

    @property
    def factors(self) -> Tuple[Tuple[GenPoly, int], ...]:
        """Distinct denominator factors of the scalar curvature, with multiplicities"""
        return self.scalar.factors


def _block_det(m: List[List[RationalExpr]]) -> RationalExpr:
    k = len(m)
    if k == 1:
        return m[0][0]
    if k == 2:
        return rational_sum((m[0][0] * m[1][1], -(m[0][1] * m[1][0])))
    return rational_sum(
        (
            m[0][0] * rational_sum((m[1][1] * m[2][2], -(m[1][2] * m[2][1]))),
            -(m[0][1] * rational_sum((m[1][0] * m[2][2], -(m[1][2] * m[2][0])))),
            m[0][2] * rational_sum((m[1][0] * m[2][1], -(m[1][1] * m[2][0]))),
        )
    )


def _block_adjugate(m: List[List[RationalExpr]]) -> List[List[RationalExpr]]:
    k = len(m)
    if k == 1:
        return [[ONE]]
    if k == 2:
        return [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]

    def minor(r, c):
        rows = [i for i in range(3) if i != r]
        cols = [j for j in range(3) if j != c]
        return rational_sum(
            (
                m[rows[0]][cols[0]] * m[rows[1]][cols[1]],
                -(m[rows[0]][cols[1]] * m[rows[1]][cols[0]]),
            )
        )

    # adj_ij = (-1)^(i+j) M_ji
    return [[minor(j, i) if (i + j) % 2 == 0 else -minor(j, i) for j in range(3)] for i in range(3)]


def metric_determinant(g: MetricField) -> RationalExpr:
    result = ONE
    for block in g.blocks():
        sub = [[g.base[a][b] for b in block] for a in block]
        result = result * _block_det(sub)
    if g.conformal is not None:
        result = result * g.conformal**g.dim
    return result


def metric_inverse(g: MetricField) -> Matrix:
    """
    Adjugate over determinant, block by block.

    Raises:
        DegenerateMetric: det(g) is identically zero
    """
    n = g.dim
    inverse = [[ZERO] * n for _ in range(n)]
    for block in g.blocks():
        sub = [[g.base[a][b] for b in block] for a in block]
        det = _block_det(sub)
        if det.is_zero:
            raise DegenerateMetric(f"{g.name}: block {block} has identically vanishing determinant")
        adj = _block_adjugate(sub)
        for i, a in enumerate(block):
            for j, b in enumerate(block):
                if j < i or adj[i][j].is_zero:
                    continue
                entry = adj[i][j] / det
                if g.conformal is not None:
                    entry = entry / g.conformal
                inverse[a][b] = entry
                inverse[b][a] = entry
    return tuple(tuple(row) for row in inverse)


class _Derivatives:
    """Memoized partial derivatives of metric components"""

    def __init__(self, g: MetricField):
        self.g = g
        self._cache: Dict[Tuple[int, int, int], RationalExpr] = {}

    def __call__(self, d: int, a: int, b: int) -> RationalExpr:
        if a > b:
            a, b = b, a
        key = (d, a, b)
        value = self._cache.get(key)
        if value is None:
            value = self.g.components[a][b].diff(self.g.vars[d])
            self._cache[key] = value
        return value


def christoffel(g: MetricField, inverse: Optional[Matrix] = None) -> Christoffel:
    n = g.dim
    ginv = inverse if inverse is not None else metric_inverse(g)
    dg = _Derivatives(g)

    gamma = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for b in range(n):
        for c in range(b, n):
            # first-kind symbols Gamma_dbc, shared by every upper index
            lowered = [
                rational_sum((dg(b, d, c), dg(c, d, b), -dg(d, b, c))) for d in range(n)
            ]
            for a in range(n):
                terms = [
                    ginv[a][d] * lowered[d]
                    for d in range(n)
                    if not ginv[a][d].is_zero and not lowered[d].is_zero
                ]
                value = rational_sum(terms) * 0.5
                gamma[a][b][c] = value
                gamma[a][c][b] = value
    return tuple(tuple(tuple(row) for row in plane) for plane in gamma)


class _GammaDerivatives:
    def __init__(self, g: MetricField, gamma: Christoffel):
        self.g = g
        self.gamma = gamma
        self._cache: Dict[Tuple[int, int, int, int], RationalExpr] = {}

    def __call__(self, e: int, a: int, b: int, c: int) -> RationalExpr:
        if b > c:
            b, c = c, b
        key = (e, a, b, c)
        value = self._cache.get(key)
        if value is None:
            value = self.gamma[a][b][c].diff(self.g.vars[e])
            self._cache[key] = value
        return value


def _products(pairs) -> List[RationalExpr]:
    return [x * y for x, y in pairs if not x.is_zero and not y.is_zero]


def ricci_tensor(g: MetricField, gamma: Optional[Christoffel] = None) -> Matrix:
    n = g.dim
    gamma = gamma if gamma is not None else christoffel(g)
    dgamma = _GammaDerivatives(g, gamma)

    ricci = [[ZERO] * n for _ in range(n)]
    for b in range(n):
        for c in range(b, n):
            terms = [dgamma(a, a, b, c) for a in range(n)]
            terms += [-dgamma(b, a, a, c) for a in range(n)]
            terms += _products((gamma[a][a][d], gamma[d][b][c]) for a in range(n) for d in range(n))
            terms += [
                -t for t in _products((gamma[a][b][d], gamma[d][a][c]) for a in range(n) for d in range(n))
            ]
            value = rational_sum(terms)
            ricci[b][c] = value
            ricci[c][b] = value
    return tuple(tuple(row) for row in ricci)


def riemann_tensor(g: MetricField, gamma: Optional[Christoffel] = None) -> Riemann:
    """All components R^a_bcd (antisymmetric in c, d)"""
    n = g.dim
    gamma = gamma if gamma is not None else christoffel(g)
    dgamma = _GammaDerivatives(g, gamma)

    riemann = [[[[ZERO] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    terms = [dgamma(c, a, d, b), -dgamma(d, a, c, b)]
                    terms += _products((gamma[a][c][e], gamma[e][d][b]) for e in range(n))
                    terms += [-t for t in _products((gamma[a][d][e], gamma[e][c][b]) for e in range(n))]
                    value = rational_sum(terms)
                    riemann[a][b][c][d] = value
                    riemann[a][b][d][c] = -value
    return tuple(tuple(tuple(tuple(r) for r in plane) for plane in block) for block in riemann)


def curvature_bundle(g: MetricField) -> CurvatureBundle:
    ginv = metric_inverse(g)
    gamma = christoffel(g, ginv)
    ricci = ricci_tensor(g, gamma)

    n = g.dim
    terms = []
    for b in range(n):
        for c in range(b, n):
            if ginv[b][c].is_zero or ricci[b][c].is_zero:
                continue
            term = ginv[b][c] * ricci[b][c]
            terms.append(term if b == c else term * 2.0)
    scalar = rational_sum(terms)

    logger.info(
        f"Curvature of {g.name}: numerator {len(scalar.num)} terms, "
        f"{len(scalar.factors)} denominator factor(s)"
    )
    for factor, m in scalar.factors:
        logger.debug(f"  factor^{m}: {len(factor)} terms")
    return CurvatureBundle(g.vars, ginv, gamma, ricci, scalar)


def curvature_scalar(g: MetricField) -> RationalExpr:
    return curvature_bundle(g).scalar

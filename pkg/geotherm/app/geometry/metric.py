"""
Symmetric metric fields over an ordered variable list.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from geotherm.app.errors import DegenerateMetric, PoleEvaluation
from geotherm.app.symbolic import EvalPoint, RationalExpr, VarId, lift

logger = logging.getLogger(__name__)

MAX_DIMENSION = 3

Matrix = Tuple[Tuple[RationalExpr, ...], ...]


@dataclass(frozen=True, eq=False)
class MetricField:
    """
    g_ab = conformal * base_ab over `vars`.

    Only the upper triangle of `base` is read; the lower triangle is mirrored
    from it, so g_ab and g_ba are the same object.
    """

    vars: Tuple[VarId, ...]
    base: Matrix
    conformal: Optional[RationalExpr] = None
    name: str = field(default="metric")

    def __post_init__(self):
        n = len(self.vars)
        if not 1 <= n <= MAX_DIMENSION:
            raise ValueError(f"metric dimension must be between 1 and {MAX_DIMENSION}, got {n}")
        if len(set(self.vars)) != n:
            raise ValueError(f"duplicate variables in {self.vars}")
        if len(self.base) != n or any(len(row) != n for row in self.base):
            raise ValueError(f"base matrix must be {n}x{n}")

        upper = [[lift(self.base[a][b]) if a <= b else None for b in range(n)] for a in range(n)]
        for a in range(n):
            for b in range(a):
                upper[a][b] = upper[b][a]
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "base", tuple(tuple(row) for row in upper))
        if self.conformal is not None:
            object.__setattr__(self, "conformal", lift(self.conformal))

    @property
    def dim(self) -> int:
        return len(self.vars)

    @cached_property
    def components(self) -> Matrix:
        n = self.dim
        rows: List[List[Optional[RationalExpr]]] = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                entry = self.base[a][b]
                if self.conformal is not None and not entry.is_zero:
                    entry = self.conformal * entry
                rows[a][b] = entry
                rows[b][a] = entry
        return tuple(tuple(row) for row in rows)

    def is_structural_zero(self, a: int, b: int) -> bool:
        return self.base[a][b].is_zero

    def blocks(self) -> List[Tuple[int, ...]]:
        """Connected components of the structurally nonzero off-diagonal pattern"""
        n = self.dim
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a in range(n):
            for b in range(a + 1, n):
                if not self.base[a][b].is_zero:
                    parent[find(a)] = find(b)

        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return sorted(tuple(g) for g in groups.values())

    def index(self, var: VarId) -> int:
        return self.vars.index(var)

    def evaluate(self, point: EvalPoint) -> np.ndarray:
        """Numeric n x n matrix at a point"""
        n = self.dim
        out = np.zeros((n, n))
        try:
            for a in range(n):
                for b in range(a, n):
                    out[a, b] = out[b, a] = self.components[a][b].evaluate(point)
        except PoleEvaluation as e:
            raise DegenerateMetric(f"{self.name} has a pole at {dict(point)}") from e
        return out


def metric_from_components(vars: Sequence[VarId], components, name: str = "metric") -> MetricField:
    """Build a MetricField from a full (symmetric) component matrix"""
    return MetricField(tuple(vars), tuple(tuple(lift(c) for c in row) for row in components), None, name)

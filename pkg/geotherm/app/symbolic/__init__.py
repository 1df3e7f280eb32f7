"""Generalized polynomials, their quotients and the text front end."""

from geotherm.app.symbolic.parser import display, poly_parse
from geotherm.app.symbolic.poly import (
    EvalPoint,
    GenPoly,
    Monomial,
    VarId,
    canonical_exponent,
    poly_add,
    poly_diff,
    poly_eval,
    poly_mul,
)
from geotherm.app.symbolic.rational import (
    RationalExpr,
    lift,
    normalize_factor,
    rat_arith,
    rat_diff,
    rational_sum,
)

__all__ = [
    "EvalPoint",
    "GenPoly",
    "Monomial",
    "RationalExpr",
    "VarId",
    "canonical_exponent",
    "display",
    "lift",
    "normalize_factor",
    "poly_add",
    "poly_diff",
    "poly_eval",
    "poly_mul",
    "poly_parse",
    "rat_arith",
    "rat_diff",
    "rational_sum",
]

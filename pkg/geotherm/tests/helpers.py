"""Random generators and comparison helpers shared by the tests."""

from fractions import Fraction

from geotherm.app.schemas import SweepSpec
from geotherm.app.symbolic import GenPoly

# Dyadic exponents keep every coefficient product exact in binary floating point
DYADIC_EXPONENTS = [Fraction(k, 4) for k in range(-8, 9)]


def random_poly(rng, variables=("S", "Q"), max_terms=4, exponents=DYADIC_EXPONENTS, integer=True):
    terms = []
    for _ in range(int(rng.integers(0, max_terms + 1))):
        coeff = float(rng.integers(-5, 6)) if integer else float(rng.uniform(-3, 3))
        powers = {v: exponents[int(rng.integers(len(exponents)))] for v in variables if rng.random() < 0.8}
        terms.append((coeff, powers))
    return GenPoly.from_terms(terms)


def random_point(rng, variables=("S", "Q"), lo=0.5, hi=3.0):
    return {v: float(rng.uniform(lo, hi)) for v in variables}


def magnitude(p: GenPoly, point) -> float:
    """Sum of absolute term values, the scale for relative comparisons"""
    absolute = GenPoly.from_terms((abs(t.coeff), dict(t.exponents)) for t in p.terms)
    return absolute.evaluate(point)


def line(var, lo, hi, points=256, **fixed):
    return SweepSpec(active_var=var, range=(lo, hi), points=points, fixed=fixed)

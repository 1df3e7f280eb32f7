"""
Generalized polynomials

A GenPoly is a finite sum of monomials c * prod(v ** e_v) with real
coefficients and real exponents. Terms are kept in a canonical, sorted form so
that structural equality coincides with mathematical equality.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Real
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from geotherm.app.errors import ExpressionBlowup, MissingVariable, NonPositiveBase
from geotherm.app.settings import get_settings

logger = logging.getLogger(__name__)

VarId = str
Exponent = Union[Fraction, float]
Key = Tuple[Tuple[VarId, Exponent], ...]
EvalPoint = Mapping[VarId, float]

# Exponents are exact rationals whenever a small denominator reproduces them
MAX_DENOMINATOR = 10**6
EXPONENT_TOL = 1e-12

COEFF_REL_TOL = 1e-12
CANCEL_REL_TOL = 1e-13
COEFF_FLOOR = 1e-300


def canonical_exponent(e) -> Exponent:
    """Normalize an exponent to a Fraction when possible, else a rounded float"""
    if isinstance(e, Fraction):
        if e.denominator <= MAX_DENOMINATOR:
            return e
        e = float(e)
    elif isinstance(e, int):
        return Fraction(e)
    else:
        e = float(e)

    if not math.isfinite(e):
        raise ValueError(f"exponent must be finite, got {e!r}")

    approx = Fraction(e).limit_denominator(MAX_DENOMINATOR)
    if abs(float(approx) - e) <= EXPONENT_TOL:
        return approx
    return round(e, 12)


def _is_integer(e: Exponent) -> bool:
    if isinstance(e, Fraction):
        return e.denominator == 1
    return float(e).is_integer()


@lru_cache(maxsize=1 << 18)
def _mul_keys(a: Key, b: Key) -> Key:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for var, e in b:
        current = merged.get(var)
        if current is None:
            merged[var] = e
            continue
        total = canonical_exponent(current + e)
        if total == 0:
            del merged[var]
        else:
            merged[var] = total
    return tuple(sorted(merged.items()))


def _make_key(exponents: Mapping[VarId, object]) -> Key:
    items = []
    for var, e in exponents.items():
        if not var:
            raise ValueError("variable names must be nonempty")
        e = canonical_exponent(e)
        if e != 0:
            items.append((var, e))
    return tuple(sorted(items))


def _check_size(count: int):
    limit = get_settings().MAX_TERMS
    if count > limit:
        raise ExpressionBlowup(count, limit)


@dataclass(frozen=True)
class Monomial:
    coeff: float
    exponents: Key

    def exponent(self, var: VarId) -> Exponent:
        for name, e in self.exponents:
            if name == var:
                return e
        return Fraction(0)


class GenPoly:
    """Canonical sum of monomials with real exponents (immutable)"""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Key, float]] = None):
        acc: Dict[Key, List[float]] = {}
        for key, c in (terms or {}).items():
            _accumulate(acc, key, float(c))
        self._terms = _finish(acc)

    @classmethod
    def _raw(cls, terms: Tuple[Tuple[Key, float], ...]) -> "GenPoly":
        poly = cls.__new__(cls)
        poly._terms = terms
        return poly

    # Construction

    @classmethod
    def zero(cls) -> "GenPoly":
        return _ZERO

    @classmethod
    def one(cls) -> "GenPoly":
        return _ONE

    @classmethod
    def constant(cls, c: float) -> "GenPoly":
        return cls.monomial(c, {})

    @classmethod
    def variable(cls, name: VarId) -> "GenPoly":
        return cls.monomial(1.0, {name: 1})

    @classmethod
    def monomial(cls, coeff: float, exponents: Mapping[VarId, object]) -> "GenPoly":
        coeff = float(coeff)
        if abs(coeff) < COEFF_FLOOR:
            return _ZERO
        return cls._raw(((_make_key(exponents), coeff),))

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[float, Mapping[VarId, object]]]) -> "GenPoly":
        acc: Dict[Key, List[float]] = {}
        for coeff, exponents in terms:
            _accumulate(acc, _make_key(exponents), float(coeff))
        return cls._raw(_finish(acc))

    # Inspection

    @property
    def terms(self) -> Tuple[Monomial, ...]:
        return tuple(Monomial(c, key) for key, c in self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    @property
    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not self._terms[0][0])

    def is_one(self) -> bool:
        return self.is_constant and not self.is_zero and self._terms[0][1] == 1.0

    @property
    def variables(self) -> Tuple[VarId, ...]:
        names = {var for key, _ in self._terms for var, _ in key}
        return tuple(sorted(names))

    def depends_on(self, var: VarId) -> bool:
        return any(name == var for key, _ in self._terms for name, _ in key)

    def __len__(self) -> int:
        return len(self._terms)

    def leading_term(self) -> "GenPoly":
        if self.is_zero:
            raise ValueError("the zero polynomial has no leading term")
        return GenPoly._raw((self._terms[0],))

    def sort_key(self) -> tuple:
        return tuple((key, c) for key, c in self._terms)

    # Arithmetic

    def __add__(self, other) -> "GenPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        acc: Dict[Key, List[float]] = {}
        for key, c in self._terms:
            _accumulate(acc, key, c)
        for key, c in other._terms:
            _accumulate(acc, key, c)
        _check_size(len(acc))
        return GenPoly._raw(_finish(acc))

    __radd__ = __add__

    def __neg__(self) -> "GenPoly":
        return GenPoly._raw(tuple((key, -c) for key, c in self._terms))

    def __sub__(self, other) -> "GenPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "GenPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "GenPoly":
        if isinstance(other, Real) and not isinstance(other, bool):
            return self.scale(float(other))
        if not isinstance(other, GenPoly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return _ZERO
        if other.is_one():
            return self
        if self.is_one():
            return other

        limit = get_settings().MAX_TERMS
        acc: Dict[Key, List[float]] = {}
        for k1, c1 in self._terms:
            for k2, c2 in other._terms:
                _accumulate(acc, _mul_keys(k1, k2), c1 * c2)
            if len(acc) > limit:
                raise ExpressionBlowup(len(acc), limit)
        return GenPoly._raw(_finish(acc))

    __rmul__ = __mul__

    def scale(self, factor: float) -> "GenPoly":
        if factor == 0:
            return _ZERO
        return GenPoly._raw(
            tuple((key, c * factor) for key, c in self._terms if abs(c * factor) >= COEFF_FLOOR)
        )

    def __pow__(self, k: int) -> "GenPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"only non-negative integer powers are supported, got {k!r}")
        result = _ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def monomial_inverse(self) -> "GenPoly":
        """1/m for a single-term polynomial m (exponents negated)"""
        if not self.is_monomial:
            raise ValueError("only a monomial has a polynomial inverse")
        key, c = self._terms[0]
        inv_key = tuple((var, -e) for var, e in key)
        return GenPoly._raw(((inv_key, 1.0 / c),))

    def divide_by_monomial(self, m: "GenPoly") -> "GenPoly":
        """Exact division by a monomial: coefficients divided, exponents subtracted"""
        if not m.is_monomial:
            raise ValueError("divisor must be a monomial")
        mkey, mc = m._terms[0]
        inv_key = tuple((var, -e) for var, e in mkey)
        acc: Dict[Key, List[float]] = {}
        for key, c in self._terms:
            _accumulate(acc, _mul_keys(key, inv_key), c / mc)
        return GenPoly._raw(_finish(acc))

    # Calculus

    def diff(self, var: VarId) -> "GenPoly":
        """Termwise power rule d/dv (c v^e rest) = c e v^(e-1) rest"""
        acc: Dict[Key, List[float]] = {}
        for key, c in self._terms:
            new_items = []
            e_var = None
            for name, e in key:
                if name == var:
                    e_var = e
                    shifted = canonical_exponent(e - 1)
                    if shifted != 0:
                        new_items.append((name, shifted))
                else:
                    new_items.append((name, e))
            if e_var is None:
                continue
            _accumulate(acc, tuple(new_items), c * float(e_var))
        return GenPoly._raw(_finish(acc))

    # Evaluation

    def evaluate(self, point: EvalPoint) -> float:
        if not self._terms:
            return 0.0
        powers: Dict[Tuple[VarId, Exponent], float] = {}
        values = []
        for key, c in self._terms:
            val = c
            for var, e in key:
                p = powers.get((var, e))
                if p is None:
                    p = _power(_lookup(point, var), e)
                    powers[(var, e)] = p
                val *= p
            values.append(val)
        return math.fsum(values)

    def evaluate_many(self, point: Mapping[VarId, object]) -> np.ndarray:
        """Vectorized evaluation; values may be scalars or numpy arrays (broadcast)"""
        arrays = {}
        for var in self.variables:
            if var not in point:
                raise MissingVariable(var)
            arr = np.asarray(point[var], dtype=float)
            if np.any(~(arr > 0)):
                bad = float(arr[~(arr > 0)].flat[0])
                raise NonPositiveBase(var, bad)
            arrays[var] = arr
        shape = np.broadcast_shapes(*(np.shape(point[v]) for v in point)) if point else ()
        if not self._terms:
            return np.zeros(shape)

        powers: Dict[Tuple[VarId, Exponent], np.ndarray] = {}
        columns = []
        for key, c in self._terms:
            val = np.full(shape, c)
            for var, e in key:
                p = powers.get((var, e))
                if p is None:
                    x = arrays[var]
                    if _is_integer(e):
                        p = x ** int(e)
                    else:
                        p = np.exp(float(e) * np.log(x))
                    powers[(var, e)] = p
                val = val * p
            columns.append(val)
        return np.sum(np.stack(columns, axis=-1), axis=-1)

    def substitute(self, values: Mapping[VarId, float]) -> "GenPoly":
        """Fix some variables at positive numeric values"""
        acc: Dict[Key, List[float]] = {}
        for key, c in self._terms:
            kept = []
            for var, e in key:
                if var in values:
                    c *= _power(_lookup(values, var), e)
                else:
                    kept.append((var, e))
            _accumulate(acc, tuple(kept), c)
        return GenPoly._raw(_finish(acc))

    def scale_variable(self, var: VarId, factor: float) -> "GenPoly":
        """Replace v by factor * v"""
        if factor <= 0:
            raise NonPositiveBase(var, factor)
        acc: Dict[Key, List[float]] = {}
        for key, c in self._terms:
            for name, e in key:
                if name == var:
                    c *= _power(factor, e)
            _accumulate(acc, key, c)
        return GenPoly._raw(_finish(acc))

    # Comparison and display

    def __eq__(self, other) -> bool:
        if isinstance(other, Real) and not isinstance(other, bool):
            other = GenPoly.constant(other)
        if not isinstance(other, GenPoly):
            return NotImplemented
        if len(self._terms) != len(other._terms):
            return False
        for (k1, c1), (k2, c2) in zip(self._terms, other._terms):
            if k1 != k2:
                return False
            if not math.isclose(c1, c2, rel_tol=COEFF_REL_TOL, abs_tol=COEFF_FLOOR):
                return False
        return True

    def __hash__(self) -> int:
        return hash(tuple(key for key, _ in self._terms))

    def display(self) -> str:
        from geotherm.app.symbolic.parser import display

        return display(self)

    def __str__(self) -> str:
        return self.display()

    def __repr__(self) -> str:
        return f"GenPoly({self.display()!r})"


def _coerce(value) -> Optional[GenPoly]:
    if isinstance(value, GenPoly):
        return value
    if isinstance(value, Real) and not isinstance(value, bool):
        return GenPoly.constant(float(value))
    return None


def _accumulate(acc: Dict[Key, List[float]], key: Key, c: float):
    slot = acc.get(key)
    if slot is None:
        acc[key] = [c, abs(c)]
    else:
        slot[0] += c
        slot[1] += abs(c)


def _finish(acc: Dict[Key, List[float]]) -> Tuple[Tuple[Key, float], ...]:
    kept = [
        (key, total)
        for key, (total, magnitude) in acc.items()
        if abs(total) >= COEFF_FLOOR and abs(total) > CANCEL_REL_TOL * magnitude
    ]
    kept.sort(key=lambda item: item[0])
    return tuple(kept)


def _lookup(point: EvalPoint, var: VarId) -> float:
    try:
        x = float(point[var])
    except KeyError:
        raise MissingVariable(var)
    if not x > 0:
        raise NonPositiveBase(var, x)
    return x


def _power(x: float, e: Exponent) -> float:
    if _is_integer(e):
        return x ** int(e)
    return math.exp(float(e) * math.log(x))


_ZERO = GenPoly._raw(())
_ONE = GenPoly._raw((((), 1.0),))


# Functional forms


def poly_add(p: GenPoly, q: GenPoly) -> GenPoly:
    return p + q


def poly_mul(p: GenPoly, q: GenPoly) -> GenPoly:
    return p * q


def poly_diff(p: GenPoly, v: VarId) -> GenPoly:
    return p.diff(v)


def poly_eval(p: GenPoly, x: EvalPoint) -> float:
    return p.evaluate(x)

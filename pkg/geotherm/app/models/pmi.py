"""
Power-Maxwell-invariant black holes in n+1 dimensions.

The mass is assembled from the horizon form

    M = (n-1) w / (16 pi) [ r^(n-2) + r^n / l^2 - K q^(2s) r^((2s-n)/(2s-1)) ]

with r = (4S/w)^(1/(n-1)) and the charge conversion q = C_q Q^(1/(2s-1)),
so the resulting potential is a three-term GenPoly in the physical (S, Q).
The exponent s is carried as the positive integer i = 2s - 1.
"""

import logging
import math
from fractions import Fraction
from typing import Optional, Tuple, Union

from geotherm.app.errors import InvalidParameter, NonPositiveEntropy
from geotherm.app.models.thermo import PMIParameters, ThermoModel
from geotherm.app.symbolic import GenPoly

logger = logging.getLogger(__name__)

SValue = Union[int, float, str, Fraction]


def omega(n: int) -> float:
    """Area of the unit (n-1)-sphere, 2 pi^(n/2) / Gamma(n/2)"""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def s_to_index(s: SValue) -> int:
    """i = 2s - 1, which must be a positive integer"""
    try:
        value = Fraction(s) if not isinstance(s, float) else Fraction(s).limit_denominator(1000)
    except (TypeError, ValueError):
        raise InvalidParameter(f"s must be a number such as 5/2, got {s!r}")
    i = 2 * value - 1
    if i.denominator != 1 or i <= 0:
        raise InvalidParameter(f"2s - 1 must be a positive integer, got s = {value}")
    return int(i)


def validate_pmi_parameters(n: int, i: int, l: Optional[float], l_is_variable: bool = False):
    """
    Raises:
        InvalidParameter: n < 3, i < 1, n = i + 1 (2s = n), or a non-positive l
    """
    if not isinstance(n, int) or n < 3:
        raise InvalidParameter(f"n must be an integer >= 3, got {n!r}")
    if not isinstance(i, int) or i < 1:
        raise InvalidParameter(f"i = 2s - 1 must be a positive integer, got {i!r}")
    if n == i + 1:
        raise InvalidParameter(f"n = {n} with i = {i} violates n != i + 1 (2s = n is excluded)")
    if not l_is_variable:
        if l is None or not math.isfinite(l) or l <= 0:
            raise InvalidParameter(f"l must be a positive real, got {l!r}")


def pmi_coupling(n: int, i: int) -> float:
    """K = (2s-1)^(2-2s) (n-1)^(s-1) (2s-n)^(2s-1) / (n-2)^s"""
    s = (i + 1) / 2
    return i ** (1 - i) * (n - 1) ** (s - 1) * float(i + 1 - n) ** i / (n - 2) ** s


def charge_scale(n: int, i: int, w: float) -> float:
    """C_q in q = C_q Q^(1/(2s-1))"""
    s = (i + 1) / 2
    return (
        (8 * math.pi / (math.sqrt(2) * s * w)) ** (1 / i)
        * math.sqrt((n - 2) / (n - 1))
        * i ** ((i - 1) / i)
        / (n - i - 1)
    )


def pmi_exponents(n: int, i: int) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """S-exponents of the three terms and the Q-exponent of the charge term"""
    return (
        Fraction(n - 2, n - 1),
        Fraction(n, n - 1),
        Fraction(i + 1 - n, (n - 1) * i),
        Fraction(i + 1, i),
    )


def pmi_coefficients(n: int, i: int, w: float) -> Tuple[float, float, float]:
    """Coefficients of S^e1, S^e2 l^-2 and S^e3 Q^eq in M"""
    e1, e2, e3, _ = pmi_exponents(n, i)
    prefactor = (n - 1) * w / (16 * math.pi)
    a = 4.0 / w
    c1 = prefactor * a ** float(e1)
    c2 = prefactor * a ** float(e2)
    c3 = -prefactor * pmi_coupling(n, i) * a ** float(e3) * charge_scale(n, i, w) ** (i + 1)
    return c1, c2, c3


def build_pmi_model(
    n: int,
    s: Optional[SValue] = None,
    l: Optional[float] = 1.0,
    l_is_variable: bool = False,
    *,
    i: Optional[int] = None,
) -> ThermoModel:
    """
    Fundamental equation M(S, Q[, l]) of a power-Maxwell black hole.

    Args:
        n: Number of spatial dimensions (n >= 3)
        s: Nonlinearity exponent; 2s - 1 must be a positive integer
        l: AdS radius when it is a parameter
        l_is_variable: Treat l as a thermodynamic variable
        i: Alternative to s, i = 2s - 1

    Raises:
        InvalidParameter: Constraint violations
    """
    if (s is None) == (i is None):
        raise InvalidParameter("exactly one of s and i must be given")
    if i is None:
        i = s_to_index(s)
    validate_pmi_parameters(n, i, l, l_is_variable)

    w = omega(n)
    e1, e2, e3, eq = pmi_exponents(n, i)
    c1, c2, c3 = pmi_coefficients(n, i, w)

    if l_is_variable:
        second = GenPoly.monomial(c2, {"S": e2, "l": -2})
        variables = ("S", "Q", "l")
        l_param = l
    else:
        second = GenPoly.monomial(c2 / l**2, {"S": e2})
        variables = ("S", "Q")
        l_param = float(l)

    potential = GenPoly.monomial(c1, {"S": e1}) + second + GenPoly.monomial(c3, {"S": e3, "Q": eq})
    params = PMIParameters(n=n, i=i, l=l_param, omega=w)
    logger.info(f"Built PMI model n={n} s={params.s} over {variables}: M = {potential.display()}")
    return ThermoModel(variables, potential, "pmi", params)


def build_rn_model(l: Optional[float] = 8.0, l_is_variable: bool = False) -> ThermoModel:
    """Reissner-Nordstrom-AdS, the n = 3, s = 1 member of the family"""
    return build_pmi_model(3, i=1, l=l, l_is_variable=l_is_variable)


def horizon_radius_from_entropy(S: float, n: int, w: Optional[float] = None) -> float:
    if not S > 0:
        raise NonPositiveEntropy(f"entropy must be positive, got {S!r}")
    w = omega(n) if w is None else w
    return (4.0 * S / w) ** (1.0 / (n - 1))


def entropy_from_horizon(r_plus: float, n: int, w: Optional[float] = None) -> float:
    if not r_plus > 0:
        raise InvalidParameter(f"horizon radius must be positive, got {r_plus!r}")
    w = omega(n) if w is None else w
    return w * r_plus ** (n - 1) / 4.0


def mass_from_horizon(r_plus: float, Q: float, params: PMIParameters, l: Optional[float] = None) -> float:
    """
    Mass from the horizon radius and the physical charge.

    Raises:
        InvalidParameter: non-positive r_plus or l, or a negative charge
    """
    if not r_plus > 0:
        raise InvalidParameter(f"horizon radius must be positive, got {r_plus!r}")
    if Q < 0:
        raise InvalidParameter(f"charge must be non-negative, got {Q!r}")
    l = params.l if l is None else l
    if l is None or not l > 0:
        raise InvalidParameter(f"l must be a positive real, got {l!r}")

    n, i, w = params.n, params.i, params.omega
    bracket = r_plus ** (n - 2) + r_plus**n / l**2
    if Q > 0:
        q = charge_scale(n, i, w) * Q ** (1.0 / i)
        bracket -= pmi_coupling(n, i) * q ** (i + 1) * r_plus ** ((i + 1 - n) / i)
    return (n - 1) * w / (16 * math.pi) * bracket

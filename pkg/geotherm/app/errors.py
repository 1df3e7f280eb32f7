"""
Exception hierarchy

Library code raises these; the command-line layer maps them to exit codes.
"""

from typing import Optional


class GeothermError(Exception):
    """Base class for all geotherm errors"""


# Symbolic core

class MissingVariable(GeothermError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"no value supplied for variable {self.name!r}"


class NonPositiveBase(GeothermError, ValueError):
    def __init__(self, name: str, value: float):
        super().__init__(f"variable {name!r} must be positive, got {value!r}")
        self.name = name
        self.value = value


class DivisionByZeroExpression(GeothermError, ZeroDivisionError):
    """Divisor is the zero polynomial"""


class ExpressionSyntaxError(GeothermError, ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position
        self.text = text


class UnknownVariable(GeothermError, ValueError):
    def __init__(self, name: str, allowed):
        super().__init__(f"unknown variable {name!r}; declared: {', '.join(allowed)}")
        self.name = name


class ExpressionBlowup(GeothermError, ArithmeticError):
    def __init__(self, terms: int, limit: int):
        super().__init__(f"expression grew to {terms} terms (limit {limit})")
        self.terms = terms
        self.limit = limit


class PoleEvaluation(GeothermError, ZeroDivisionError):
    """A rational expression was evaluated exactly on a zero of its denominator"""


class RootNotBracketed(GeothermError, ValueError):
    def __init__(self, lo: float, hi: float, f_lo: float, f_hi: float):
        self.bracket = (lo, hi)
        super().__init__(f"no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}")


# Geometry

class DegenerateMetric(GeothermError, ArithmeticError):
    """det(g) vanishes (or is numerically singular) at the requested point"""


class StencilOutOfDomain(GeothermError, ValueError):
    """A finite-difference stencil left the positive domain"""


class DomainError(GeothermError, ValueError):
    """A coordinate outside the physical domain S, Q, l > 0"""


# Models

class InvalidParameter(GeothermError, ValueError):
    """A model parameter violates the validity constraints"""


class NonPositiveEntropy(GeothermError, ValueError):
    """Entropy must be strictly positive"""


# Command line

class ConfigError(GeothermError, ValueError):
    def __init__(self, key: Optional[str], reason: str):
        where = key if key else "<config>"
        super().__init__(f"{where}: {reason}")
        self.key = key
        self.reason = reason

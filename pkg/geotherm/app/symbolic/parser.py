"""
Text front end for generalized polynomials.

Grammar (whitespace ignored)::

    expr     := [sign] term (sign term)*
    term     := factor ("*" factor)*
    factor   := NUMBER | NAME ["^" exponent]
    exponent := INT | "(" ["-"] NUMBER ["/" INT] ")" | "-" INT

`display` writes the same grammar, so `poly_parse(display(p)) == p`.
"""

import logging
import re
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from geotherm.app.errors import ExpressionSyntaxError, UnknownVariable
from geotherm.app.symbolic.poly import Exponent, GenPoly, canonical_exponent

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                bad = len(text) - len(text[pos:].lstrip())
                raise ExpressionSyntaxError(f"unexpected character {text[bad]!r}", bad, text)
            kind = m.lastgroup
            start = m.start(kind)
            self.items.append((kind, m.group(kind), start))
            pos = m.end()
        self.index = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        if self.index < len(self.items):
            return self.items[self.index]
        return None

    def take(self) -> Tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ExpressionSyntaxError("unexpected end of input", len(self.text), self.text)
        self.index += 1
        return tok

    def expect(self, kind: str, value: Optional[str] = None) -> Tuple[str, str, int]:
        tok = self.take()
        if tok[0] != kind or (value is not None and tok[1] != value):
            wanted = value if value is not None else kind
            raise ExpressionSyntaxError(f"expected {wanted!r}, got {tok[1]!r}", tok[2], self.text)
        return tok

    def at_op(self, *values: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "op" and tok[1] in values


def poly_parse(text: str, variables: Optional[Iterable[str]] = None) -> GenPoly:
    """
    Parse a generalized polynomial.

    Args:
        text: Expression such as ``"2*S^(1/2) - Q"``
        variables: Optional declared variable list; any other name is rejected

    Returns:
        Canonical GenPoly

    Raises:
        ExpressionSyntaxError: Malformed input (carries the character position)
        UnknownVariable: A name outside ``variables``
    """
    allowed = tuple(variables) if variables is not None else None
    tokens = _Tokens(text)
    if not tokens.items:
        raise ExpressionSyntaxError("empty expression", 0, text)

    terms: List[Tuple[float, Dict[str, Exponent]]] = []
    sign = 1.0
    if tokens.at_op("+", "-"):
        sign = -1.0 if tokens.take()[1] == "-" else 1.0
    terms.append(_term(tokens, sign, allowed))

    while tokens.peek() is not None:
        kind, value, pos = tokens.take()
        if kind != "op" or value not in "+-":
            raise ExpressionSyntaxError(f"expected '+' or '-', got {value!r}", pos, text)
        terms.append(_term(tokens, -1.0 if value == "-" else 1.0, allowed))

    return GenPoly.from_terms(terms)


def _term(tokens: _Tokens, sign: float, allowed) -> Tuple[float, Dict[str, Exponent]]:
    coeff = sign
    exponents: Dict[str, Exponent] = {}
    while True:
        kind, value, pos = tokens.take()
        if kind == "number":
            coeff *= float(value)
        elif kind == "name":
            if allowed is not None and value not in allowed:
                raise UnknownVariable(value, allowed)
            e: Exponent = Fraction(1)
            if tokens.at_op("^"):
                tokens.take()
                e = _exponent(tokens)
            exponents[value] = canonical_exponent(exponents.get(value, 0) + e)
        else:
            raise ExpressionSyntaxError(f"expected a number or variable, got {value!r}", pos, tokens.text)

        if not tokens.at_op("*"):
            return coeff, exponents
        tokens.take()


def _exponent(tokens: _Tokens) -> Exponent:
    if tokens.at_op("("):
        tokens.take()
        negative = False
        if tokens.at_op("-"):
            tokens.take()
            negative = True
        _, num, _ = tokens.expect("number")
        value = Fraction(num)
        if tokens.at_op("/"):
            tokens.take()
            _, den, pos = tokens.expect("number")
            if Fraction(den) == 0:
                raise ExpressionSyntaxError("zero denominator in exponent", pos, tokens.text)
            value = value / Fraction(den)
        tokens.expect("op", ")")
        return canonical_exponent(-value if negative else value)

    negative = False
    if tokens.at_op("-"):
        tokens.take()
        negative = True
    _, num, _ = tokens.expect("number")
    value = Fraction(num)
    return canonical_exponent(-value if negative else value)


# Display


def format_coefficient(c: float) -> str:
    if c.is_integer() and abs(c) < 1e15:
        return str(int(c))
    return repr(c)


def format_exponent(e: Exponent) -> str:
    if isinstance(e, Fraction):
        if e.denominator == 1:
            return str(e.numerator) if e > 0 else f"({e.numerator})"
        return f"({e.numerator}/{e.denominator})"
    return f"({e!r})"


def _format_term(coeff: float, key) -> str:
    factors = []
    for var, e in key:
        factors.append(var if e == 1 else f"{var}^{format_exponent(e)}")
    magnitude = abs(coeff)
    if not factors:
        return format_coefficient(magnitude)
    if magnitude != 1.0:
        factors.insert(0, format_coefficient(magnitude))
    return "*".join(factors)


def display(p: GenPoly) -> str:
    """Render a GenPoly in the parser grammar"""
    if p.is_zero:
        return "0"
    parts = []
    for i, term in enumerate(p.terms):
        body = _format_term(term.coeff, term.exponents)
        if i == 0:
            parts.append(f"-{body}" if term.coeff < 0 else body)
        else:
            parts.append(f" - {body}" if term.coeff < 0 else f" + {body}")
    return "".join(parts)

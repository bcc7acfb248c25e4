"""Parse strings such as ``x1^3*x2+x2^3`` into exponent matrices."""

import logging
import re

from frobforge.bhk.models.polynomial import InvertiblePolynomial
from frobforge.utils.errors import NotInvertible, ParseError

logger = logging.getLogger(__name__)

FACTOR = re.compile(r"x(\d+)(?:\^(\d+))?")
COEFFICIENT = re.compile(r"\d+")


def _monomial(text: str, position: int) -> dict[int, int]:
    powers: dict[int, int] = {}
    if not text:
        raise ParseError(f"Empty monomial at position {position}")
    for token in text.split("*"):
        if COEFFICIENT.fullmatch(token):
            if int(token) != 1:
                raise ParseError(f"Coefficient {token} in monomial {position}; only 1 is allowed")
            continue
        match = FACTOR.fullmatch(token)
        if match is None:
            raise ParseError(f"Cannot read factor {token!r} in monomial {position}")
        var = int(match.group(1))
        if var < 1:
            raise ParseError(f"Variables are numbered from x1, got x{var}")
        power = int(match.group(2) or 1)
        if power < 1:
            raise ParseError(f"Exponent of x{var} must be positive")
        powers[var] = powers.get(var, 0) + power
    if not powers:
        raise ParseError(f"Monomial {position} has no variables")
    return powers


def parse(poly: str) -> InvertiblePolynomial:
    """Exponent matrix of a sum of unit-coefficient monomials in x1..xn."""
    text = re.sub(r"\s+", "", poly)
    if not text:
        raise ParseError("Empty polynomial")
    monomials = [_monomial(part, k + 1) for k, part in enumerate(text.split("+"))]
    n = max(var for m in monomials for var in m)
    if len(monomials) != n:
        raise NotInvertible(f"{len(monomials)} monomials in {n} variables")
    rows = tuple(tuple(m.get(j + 1, 0) for j in range(n)) for m in monomials)
    polynomial = InvertiblePolynomial(rows)
    logger.debug(f"Parsed {poly!r} with det E = {polynomial.det}")
    return polynomial

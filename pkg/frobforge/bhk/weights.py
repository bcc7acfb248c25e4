"""Exact quasi-homogeneous weights and the Calabi-Yau condition."""

import logging
from dataclasses import dataclass
from fractions import Fraction

import sympy

from frobforge.bhk.models.polynomial import InvertiblePolynomial, WeightSystem
from frobforge.utils.errors import NonPositiveWeight

logger = logging.getLogger(__name__)

MAX_PADDING_EXPONENT = 12


def _to_fraction(value: sympy.Rational) -> Fraction:
    r = sympy.Rational(value)
    return Fraction(int(r.p), int(r.q))


def weights(P: InvertiblePolynomial, strict: bool = False) -> WeightSystem:
    """Charges q = E⁻¹·1 by exact elimination.

    Non-positive charges are logged; with ``strict`` they raise NonPositiveWeight.
    """
    q = P.matrix.LUsolve(sympy.ones(P.n, 1))
    system = WeightSystem.from_charges(tuple(_to_fraction(c) for c in q))
    if not system.positive:
        message = f"{P} has non-positive charges {[str(c) for c in system.q]}"
        if strict:
            raise NonPositiveWeight(message)
        logger.warning(message)
    return system


def calabi_yau_check(q: WeightSystem) -> bool:
    """Σ q_i = 1 exactly."""
    return q.total == 1


@dataclass(frozen=True)
class Completion:
    """Outcome of padding a polynomial with one Fermat monomial."""

    missing: Fraction
    exponent: int | None
    polynomial: InvertiblePolynomial | None


def fermat_completion(
    P: InvertiblePolynomial, max_exponent: int = MAX_PADDING_EXPONENT
) -> Completion:
    """Search a ≤ max_exponent with Σ q + 1/a = 1 for P + x_{n+1}^a."""
    missing = 1 - weights(P).total
    for a in range(2, max_exponent + 1):
        if Fraction(1, a) == missing:
            rows = tuple((*row, 0) for row in P.exponents) + ((0,) * P.n + (a,),)
            return Completion(missing, a, InvertiblePolynomial(rows))
    logger.info(f"{P}: no Fermat padding with exponent <= {max_exponent} (missing {missing})")
    return Completion(missing, None, None)

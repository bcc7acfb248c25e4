"""Invertible polynomials, their weights and diagonal phase symmetries."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any

import sympy

from frobforge.utils.errors import NotInvertible, ParseError

logger = logging.getLogger(__name__)


def format_fraction(value: Fraction) -> str:
    """Reduced ``a/b`` string, denominators always written."""
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Inverse of ``format_fraction``; bare integers are accepted."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"Invalid fraction {text!r}") from e


@dataclass(frozen=True)
class InvertiblePolynomial:
    """Sum of n unit-coefficient monomials in n variables; row i of E is monomial i."""

    exponents: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(e) for e in row) for row in self.exponents)
        object.__setattr__(self, "exponents", rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise NotInvertible(f"Exponent matrix must be square, got {n} monomials")
        if any(e < 0 for row in rows for e in row):
            raise NotInvertible("Exponents must be nonnegative")
        if len(set(rows)) != n:
            raise NotInvertible("Repeated monomial")
        if any(all(row[j] == 0 for row in rows) for j in range(n)):
            raise NotInvertible("Some variable appears in no monomial")
        if self.det == 0:
            raise NotInvertible(f"Exponent matrix {rows} is singular")

    @property
    def n(self) -> int:
        """Number of variables."""
        return len(self.exponents)

    @cached_property
    def matrix(self) -> sympy.Matrix:
        """Exponent matrix E over the integers."""
        return sympy.Matrix(self.exponents)

    @cached_property
    def det(self) -> int:
        """det E, computed exactly."""
        return int(sympy.Matrix(self.exponents).det())

    def transpose(self) -> "InvertiblePolynomial":
        """Polynomial with exponent matrix Eᵀ."""
        return InvertiblePolynomial(tuple(zip(*self.exponents, strict=True)))

    def support(self, monomial: int) -> tuple[int, ...]:
        """Variables appearing in a monomial."""
        return tuple(j for j, e in enumerate(self.exponents[monomial]) if e)

    def __str__(self) -> str:
        monomials = []
        for row in self.exponents:
            factors = [f"x{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(row) if e]
            monomials.append("*".join(factors))
        return "+".join(monomials)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"polynomial": str(self), "exponents": [list(row) for row in self.exponents]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "InvertiblePolynomial":
        """Create instance from dictionary."""
        return cls(tuple(tuple(row) for row in data["exponents"]))


@dataclass(frozen=True)
class WeightSystem:
    """Charges q_i = w_i / d with gcd(w_1, ..., w_n, d) = 1."""

    q: tuple[Fraction, ...]
    w: tuple[int, ...]
    d: int

    @classmethod
    def from_charges(cls, q: tuple[Fraction, ...]) -> "WeightSystem":
        """Integer weights and degree from exact charges."""
        d = math.lcm(*(c.denominator for c in q))
        w = tuple(int(c * d) for c in q)
        g = math.gcd(*w, d)
        return cls(tuple(q), tuple(x // g for x in w), d // g)

    @property
    def total(self) -> Fraction:
        """Σ q_i."""
        return sum(self.q, Fraction(0))

    @property
    def positive(self) -> bool:
        """All charges strictly positive."""
        return all(c > 0 for c in self.q)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"q": [format_fraction(c) for c in self.q], "w": list(self.w), "d": self.d}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "WeightSystem":
        """Create instance from dictionary."""
        return cls(tuple(parse_fraction(c) for c in data["q"]), tuple(data["w"]), int(data["d"]))


@dataclass(frozen=True)
class PhaseVector:
    """diag(exp 2πiφ_1, ..., exp 2πiφ_n) stored as φ reduced into [0, 1)."""

    phases: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phases", tuple(Fraction(p) % 1 for p in self.phases))

    @classmethod
    def zero(cls, n: int) -> "PhaseVector":
        """Identity element."""
        return cls((Fraction(0),) * n)

    @classmethod
    def parse(cls, text: str) -> "PhaseVector":
        """Comma-separated fractions such as ``1/3,0,2/3``."""
        return cls(tuple(parse_fraction(part) for part in text.split(",")))

    @property
    def n(self) -> int:
        """Number of coordinates."""
        return len(self.phases)

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        return PhaseVector(tuple(a + b for a, b in zip(self.phases, other.phases, strict=True)))

    def __neg__(self) -> "PhaseVector":
        return PhaseVector(tuple(-a for a in self.phases))

    def __mul__(self, k: int) -> "PhaseVector":
        return PhaseVector(tuple(k * a for a in self.phases))

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        """Identity test."""
        return all(p == 0 for p in self.phases)

    @property
    def order(self) -> int:
        """Multiplicative order of the diagonal matrix."""
        return math.lcm(*(p.denominator for p in self.phases))

    def determinant_phase(self) -> Fraction:
        """Σ φ_i mod 1, the phase of the determinant."""
        return sum(self.phases, Fraction(0)) % 1

    def to_list(self) -> list[str]:
        """Coordinates as ``a/b`` strings."""
        return [format_fraction(p) for p in self.phases]

    def __str__(self) -> str:
        return ",".join(self.to_list())


class AtomKind(str, Enum):
    """Atomic types of invertible polynomials."""

    FERMAT = "fermat"
    LOOP = "loop"
    CHAIN = "chain"


@dataclass(frozen=True)
class Atom:
    """One atomic summand in canonical variable order.

    Loops read x_{v0}^{m0} x_{v1} + ... + x_{vN}^{mN} x_{v0}; chains read
    x_{v0}^{m0} x_{v1} + ... + x_{vN}^{mN}.
    """

    kind: AtomKind
    variables: tuple[int, ...]
    exponents: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary; variables are 1-based."""
        return {
            "type": self.kind.value,
            "variables": [f"x{v + 1}" for v in self.variables],
            "exponents": list(self.exponents),
        }

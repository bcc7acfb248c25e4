"""Diagonal symmetry groups, the exponent transpose and the dual group pairing."""

import logging
import math
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any

from sympy import ZZ
from sympy.matrices.normalforms import smith_normal_form

from frobforge.bhk.models.polynomial import InvertiblePolynomial, PhaseVector, WeightSystem
from frobforge.utils.errors import (
    InconsistentGroup,
    NotGroupElement,
    NotSubgroup,
    ParamOutOfRange,
)

logger = logging.getLogger(__name__)

MAX_SUBGROUP_SEARCH = 256


def is_symmetry(P: InvertiblePolynomial, phi: PhaseVector) -> bool:
    """E·φ ∈ ℤⁿ, i.e. every monomial is invariant."""
    if phi.n != P.n:
        return False
    return all(
        sum((e * p for e, p in zip(row, phi.phases, strict=True)), Fraction(0)).denominator == 1
        for row in P.exponents
    )


def closure(generators: Iterable[PhaseVector], n: int) -> frozenset[PhaseVector]:
    """All sums of generators (breadth first from the identity)."""
    gens = [g for g in generators if not g.is_zero]
    seen = {PhaseVector.zero(n)}
    queue = deque(seen)
    while queue:
        current = queue.popleft()
        for g in gens:
            nxt = current + g
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


@dataclass(frozen=True)
class DiagonalGroup:
    """Subgroup of the diagonal symmetries of ``polynomial`` generated by ``generators``."""

    polynomial: InvertiblePolynomial
    generators: tuple[PhaseVector, ...]
    _elements: frozenset[PhaseVector] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        for g in self.generators:
            if not is_symmetry(self.polynomial, g):
                raise NotSubgroup(f"({g}) is not a diagonal symmetry of {self.polynomial}")

    def elements(self) -> frozenset[PhaseVector]:
        """Every group element."""
        if self._elements is None:
            object.__setattr__(self, "_elements", closure(self.generators, self.polynomial.n))
        return self._elements  # type: ignore[return-value]

    @property
    def order(self) -> int:
        """Number of elements."""
        return len(self.elements())

    def contains(self, phi: PhaseVector) -> bool:
        """Membership test."""
        return phi in self.elements()

    def is_subgroup_of(self, other: "DiagonalGroup") -> bool:
        """Containment of generator sets' closures."""
        return all(other.contains(g) for g in self.generators)

    @cached_property
    def smith_divisors(self) -> tuple[int, ...]:
        """Elementary divisors of the exponent matrix."""
        D = smith_normal_form(self.polynomial.matrix, domain=ZZ)
        return tuple(abs(int(D[i, i])) for i in range(self.polynomial.n))

    def same_elements(self, other: "DiagonalGroup") -> bool:
        """Equality as sets of phase vectors."""
        return self.elements() == other.elements()

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "polynomial": str(self.polynomial),
            "order": self.order,
            "generators": [g.to_list() for g in self.generators],
        }


def transpose_mirror(P: InvertiblePolynomial) -> InvertiblePolynomial:
    """Berglund-Hübsch transpose: the polynomial with exponent matrix Eᵀ."""
    return P.transpose()


def aut_group(P: InvertiblePolynomial) -> DiagonalGroup:
    """Maximal diagonal symmetry group, generated by the columns of E⁻¹ mod 1.

    Its order is cross-checked against |det E| and the Smith elementary divisors.
    """
    inverse = P.matrix.inv()
    generators = tuple(
        PhaseVector(tuple(Fraction(int(x.p), int(x.q)) for x in inverse[:, j])) for j in range(P.n)
    )
    group = DiagonalGroup(P, generators)
    smith = math.prod(group.smith_divisors)
    if not group.order == abs(P.det) == smith:
        raise InconsistentGroup(
            f"{P}: |Aut| = {group.order}, |det E| = {abs(P.det)}, Smith product {smith}"
        )
    logger.debug(f"{P}: |Aut| = {group.order}")
    return group


def j_element(q: WeightSystem) -> PhaseVector:
    """Exponential grading element J = (exp 2πi q_1, ..., exp 2πi q_n)."""
    return PhaseVector(q.q)


def sl_check(phi: PhaseVector, P: InvertiblePolynomial) -> bool:
    """Whether the symmetry φ has determinant 1 (Σ φ_i ∈ ℤ)."""
    if not is_symmetry(P, phi):
        raise NotGroupElement(f"({phi}) is not a diagonal symmetry of {P}")
    return phi.determinant_phase() == 0


def pairing(P: InvertiblePolynomial, psi: PhaseVector, phi: PhaseVector) -> Fraction:
    """ψᵀ E φ mod 1 for ψ ∈ Aut(Wᵀ) and φ ∈ Aut(W)."""
    total = Fraction(0)
    for i, row in enumerate(P.exponents):
        total += psi.phases[i] * sum(
            (e * p for e, p in zip(row, phi.phases, strict=True)), Fraction(0)
        )
    return total % 1


def _minimal_generators(elements: frozenset[PhaseVector], n: int) -> tuple[PhaseVector, ...]:
    """Greedy generating set in a deterministic order."""
    ordered = sorted(elements, key=lambda g: (g.order, g.phases))
    gens: list[PhaseVector] = []
    span = frozenset({PhaseVector.zero(n)})
    for g in ordered:
        if g not in span:
            gens.append(g)
            span = closure(gens, n)
        if span == elements:
            break
    return tuple(gens)


def dual_group(G: DiagonalGroup, P: InvertiblePolynomial | None = None) -> DiagonalGroup:
    """Gᵀ = {ψ ∈ Aut(Wᵀ) : ψᵀ E φ ∈ ℤ for all φ ∈ G}."""
    P = P or G.polynomial
    if P != G.polynomial:
        G = DiagonalGroup(P, G.generators)
    if not G.is_subgroup_of(aut_group(P)):
        raise NotSubgroup(f"Group is not contained in Aut({P})")
    PT = transpose_mirror(P)
    members = frozenset(
        psi
        for psi in aut_group(PT).elements()
        if all(pairing(P, psi, phi) == 0 for phi in G.generators)
    )
    dual = DiagonalGroup(PT, _minimal_generators(members, P.n), members)
    logger.debug(f"|G| = {G.order}, |G^T| = {dual.order}, |Aut| = {abs(P.det)}")
    return dual


def all_subgroups(G: DiagonalGroup) -> list[DiagonalGroup]:
    """Every subgroup of a small group, found by adjoining elements until nothing new appears."""
    if G.order > MAX_SUBGROUP_SEARCH:
        raise ParamOutOfRange(f"Subgroup enumeration limited to order {MAX_SUBGROUP_SEARCH}")
    n = G.polynomial.n
    found: dict[frozenset[PhaseVector], tuple[PhaseVector, ...]] = {
        frozenset({PhaseVector.zero(n)}): ()
    }
    frontier = list(found.items())
    elements = sorted(G.elements(), key=lambda g: g.phases)
    while frontier:
        nxt = []
        for members, gens in frontier:
            for g in elements:
                if g in members:
                    continue
                bigger = closure((*gens, g), n)
                if bigger not in found:
                    found[bigger] = (*gens, g)
                    nxt.append((bigger, found[bigger]))
        frontier = nxt
    groups = [DiagonalGroup(G.polynomial, gens, members) for members, gens in found.items()]
    return sorted(groups, key=lambda H: (H.order, sorted(h.phases for h in H.elements())))

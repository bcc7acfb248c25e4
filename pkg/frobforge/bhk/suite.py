"""Verification suite for invertible polynomials and their mirror groups."""

import logging
import math
from collections.abc import Callable
from fractions import Fraction

import numpy as np

from frobforge.bhk.analysis import analyze
from frobforge.bhk.classifier import classify_atomic
from frobforge.bhk.groups import (
    DiagonalGroup,
    all_subgroups,
    aut_group,
    dual_group,
    is_symmetry,
    j_element,
    sl_check,
    transpose_mirror,
)
from frobforge.bhk.models.polynomial import AtomKind, InvertiblePolynomial, PhaseVector
from frobforge.bhk.parser import parse
from frobforge.bhk.weights import calabi_yau_check, fermat_completion, weights
from frobforge.utils.config import RunConfig
from frobforge.utils.errors import FrobforgeError, NonPositiveWeight, NotInvertible, ParseError
from frobforge.utils.reporting import Report
from frobforge.utils.sampling import rng
from frobforge.utils.suite import Suite

logger = logging.getLogger(__name__)

QUINTIC = "x1^5+x2^5+x3^5+x4^5+x5^5"
LOOP = "x1^3*x2+x2^3*x1"
CHAIN = "x1^2*x2+x2^2"
CUBIC_CHAIN = "x1^3*x2+x2^3"
GROUP_CASES = ("x1^3", LOOP, CHAIN, CUBIC_CHAIN, "x1^2+x2^4", QUINTIC)
SUBGROUP_CASES = ("x1^3", LOOP, CHAIN, "x1^2+x2^4")


def random_invertible(n: int, gen: np.random.Generator, high: int = 4) -> InvertiblePolynomial:
    """Random exponent matrix with entries below ``high`` that passes the invertibility checks."""
    while True:
        E = gen.integers(0, high, size=(n, n))
        try:
            return InvertiblePolynomial(tuple(tuple(int(e) for e in row) for row in E))
        except NotInvertible:
            continue


def _raises(fn: Callable[[], object], error: type[Exception]) -> bool:
    try:
        fn()
    except error:
        return True
    return False


class BHKSuite(Suite):
    """Exact weights, atoms, transposes and dual groups of invertible polynomials."""

    name = "bhk"

    def checks(self) -> list[Callable[[], None]]:
        """Check methods in execution order."""
        return [
            self.parsing,
            self.weight_systems,
            self.calabi_yau,
            self.atoms,
            self.transposes,
            self.group_orders,
            self.grading_element,
            self.special_linear,
            self.duality,
        ]

    def parsing(self) -> None:
        """Exponent matrices are read off and degenerate input is refused."""
        self.flag("parse_quintic", parse(QUINTIC).exponents == tuple(
            tuple(5 if i == j else 0 for j in range(5)) for i in range(5)
        ))
        self.flag("parse_loop", parse(LOOP).exponents == ((3, 1), (1, 3)))
        self.flag("parse_repeated_refused", _raises(lambda: parse("x1^2+x1^2"), NotInvertible))
        self.flag("parse_coefficient_refused", _raises(lambda: parse("2*x1^3"), ParseError))

    def weight_systems(self) -> None:
        """q = E⁻¹·1 exactly for Fermat, loop and chain."""
        quintic = weights(parse(QUINTIC))
        self.flag("weights_quintic", quintic.q == (Fraction(1, 5),) * 5 and quintic.d == 5)
        self.flag("weights_loop", weights(parse(LOOP)).q == (Fraction(1, 4), Fraction(1, 4)))
        self.flag("weights_chain", weights(parse(CHAIN)).q == (Fraction(1, 4), Fraction(1, 2)))
        negative = parse("x1*x2^2+x2")
        refused = _raises(lambda: weights(negative, strict=True), NonPositiveWeight)
        self.flag("weights_non_positive_reported", refused)

    def calabi_yau(self) -> None:
        """Σq = 1 and the Fermat padding scan."""
        self.flag("cy_quintic", calabi_yau_check(weights(parse(QUINTIC))))
        self.flag("cy_loop_false", not calabi_yau_check(weights(parse(LOOP))))
        scan = fermat_completion(parse(CUBIC_CHAIN))
        self.flag("cy_padding_unreachable", scan.exponent is None, detail=f"missing {scan.missing}")
        padded = fermat_completion(parse("x1^3+x2^3"))
        ok = padded.polynomial is not None and calabi_yau_check(weights(padded.polynomial))
        self.flag("cy_padding_cubic", ok and padded.exponent == 3)

    def atoms(self) -> None:
        """Fermat, loop and chain atoms with their exponents."""
        quintic = classify_atomic(parse(QUINTIC))
        self.flag(
            "atoms_quintic",
            len(quintic) == 5
            and all(a.kind is AtomKind.FERMAT and a.exponents == (5,) for a in quintic),
        )
        (loop,) = classify_atomic(parse(LOOP))
        self.flag("atoms_loop", loop.kind is AtomKind.LOOP and loop.exponents == (3, 3))
        (chain,) = classify_atomic(parse(CHAIN))
        self.flag("atoms_chain", chain.kind is AtomKind.CHAIN and chain.exponents == (2, 2))

    def transposes(self) -> None:
        """Transpose is an involution, reverses chains and keeps the quintic's weights."""
        count = 20 if self.cfg.smoke else 100
        ok = True
        for k in range(count):
            P = random_invertible(3, rng(self.cfg.seed, 4, k))
            ok = ok and transpose_mirror(transpose_mirror(P)) == P
        self.flag("transpose_involution", ok, count)
        (chain,) = classify_atomic(transpose_mirror(parse(CHAIN)))
        reversed_chain = chain.kind is AtomKind.CHAIN and chain.variables == (1, 0)
        self.flag("transpose_chain_reversed", reversed_chain)
        quintic = parse(QUINTIC)
        same = weights(transpose_mirror(quintic)) == weights(quintic)
        self.flag("transpose_quintic_weights", same)

    def group_orders(self) -> None:
        """|Aut| = |det E| = product of Smith divisors."""
        for poly in GROUP_CASES:
            G = aut_group(parse(poly))
            smith = math.prod(G.smith_divisors)
            det = abs(G.polynomial.det)
            self.flag(f"aut_order[{poly}]", G.order == det == smith, detail=f"order {G.order}")
            self.row("aut_orders", polynomial=poly, order=G.order, det=det, smith=smith)

    def grading_element(self) -> None:
        """J has order d and is a symmetry."""
        for poly, order in ((QUINTIC, 5), (LOOP, 4)):
            P = parse(poly)
            J = j_element(weights(P))
            self.flag(f"j_order[{poly}]", J.order == order and is_symmetry(P, J))

    def special_linear(self) -> None:
        """det = 1 is decided exactly."""
        quintic = parse(QUINTIC)
        self.flag("sl_quintic_j", sl_check(j_element(weights(quintic)), quintic))
        P = parse(CUBIC_CHAIN)
        self.flag("sl_cubic_chain_false", not sl_check(PhaseVector((Fraction(1, 3), 0)), P))
        self.flag("sl_identity", sl_check(PhaseVector.zero(2), P))

    def duality(self) -> None:
        """Dual of Aut is trivial, of the trivial group is Aut(Wᵀ); double duals return G."""
        cases = 0
        ok = True
        for poly in SUBGROUP_CASES:
            P = parse(poly)
            aut = aut_group(P)
            full = dual_group(aut, P)
            trivial = dual_group(DiagonalGroup(P, ()), P)
            ok = ok and full.order == 1
            ok = ok and trivial.same_elements(aut_group(transpose_mirror(P)))
            for H in all_subgroups(aut):
                HT = dual_group(H)
                back = dual_group(HT)
                ok = ok and back.same_elements(H) and H.order * HT.order == aut.order
                cases += 1
        self.flag("dual_group_identities", ok, cases)
        try:
            self.report.payload["quintic"] = analyze(QUINTIC)
        except FrobforgeError:
            logger.exception("Quintic summary failed")


def run(cfg: RunConfig) -> Report:
    """Run the suite and return its report."""
    return BHKSuite(cfg).run()

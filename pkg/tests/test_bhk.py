"""Tests for invertible polynomials, their symmetry groups and transposes."""

import math
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, reject, settings
from hypothesis import strategies as st

from frobforge.bhk.analysis import analyze, dual, parse_generators
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
from frobforge.bhk.suite import CHAIN, LOOP, QUINTIC, BHKSuite
from frobforge.bhk.weights import calabi_yau_check, fermat_completion, weights
from frobforge.utils.errors import (
    InconsistentGroup,
    NonPositiveWeight,
    NotDecomposable,
    NotGroupElement,
    NotInvertible,
    NotSubgroup,
    ParseError,
)
from tests.utils import failed_checks, smoke_config


@st.composite
def invertible_polynomials(draw: st.DrawFn) -> InvertiblePolynomial:
    """Exponent matrices with entries up to 6 and n up to 4 that pass the invertibility checks."""
    n = draw(st.integers(1, 4))
    rows = draw(
        st.lists(
            st.lists(st.integers(0, 6), min_size=n, max_size=n), min_size=n, max_size=n
        )
    )
    try:
        return InvertiblePolynomial(tuple(tuple(r) for r in rows))
    except NotInvertible:
        reject()


@given(invertible_polynomials())
@settings(max_examples=100, deadline=None)
def test_transpose_is_an_involution(P: InvertiblePolynomial) -> None:
    """(Wᵀ)ᵀ = W and det is preserved."""
    assert transpose_mirror(transpose_mirror(P)) == P
    assert transpose_mirror(P).det == P.det


@given(invertible_polynomials())
@settings(max_examples=50, deadline=None)
def test_aut_order_equals_det(P: InvertiblePolynomial) -> None:
    """|Aut(W)| = |det E| = product of elementary divisors."""
    G = aut_group(P)
    assert G.order == abs(P.det) == math.prod(G.smith_divisors)


def test_aut_group_refuses_inconsistent_orders(monkeypatch: pytest.MonkeyPatch) -> None:
    """A Smith product that disagrees with |det E| is an error, not a log line."""
    monkeypatch.setattr(DiagonalGroup, "smith_divisors", property(lambda self: (1,)))
    with pytest.raises(InconsistentGroup, match="Smith product 1"):
        aut_group(parse(CHAIN))


def test_parse_exponent_matrices() -> None:
    """Factors accumulate and rows follow monomial order."""
    assert parse(LOOP).exponents == ((3, 1), (1, 3))
    assert parse(" x1^2 * x2 + x2^2 ").exponents == ((2, 1), (0, 2))
    assert parse("x1*x1^2").exponents == ((3,),)
    assert str(parse(CHAIN)) == CHAIN


@pytest.mark.parametrize(
    ("text", "error"),
    [
        ("", ParseError),
        ("2*x1^3", ParseError),
        ("x1^3+", ParseError),
        ("y1^3", ParseError),
        ("x0^2", ParseError),
        ("x1^2+x1^2", NotInvertible),
        ("x1^2+x2^2+x1*x2", NotInvertible),
        ("x1^2*x2^2+x1*x2", NotInvertible),
    ],
)
def test_parse_refusals(text: str, error: type[Exception]) -> None:
    """Malformed or degenerate input is refused."""
    with pytest.raises(error):
        parse(text)


def test_weights_of_atoms() -> None:
    """Exact charges for Fermat, loop and chain."""
    quintic = weights(parse(QUINTIC))
    assert quintic.q == (Fraction(1, 5),) * 5
    assert (quintic.w, quintic.d) == ((1,) * 5, 5)
    assert weights(parse(LOOP)).q == (Fraction(1, 4), Fraction(1, 4))
    assert weights(parse(CHAIN)).q == (Fraction(1, 4), Fraction(1, 2))


def test_non_positive_weights() -> None:
    """x1 x2² + x2 has q1 = -1; strict mode refuses it."""
    P = parse("x1*x2^2+x2")
    assert not weights(P).positive
    with pytest.raises(NonPositiveWeight):
        weights(P, strict=True)


def test_calabi_yau_condition() -> None:
    """The quintic is Calabi-Yau and the loop is not."""
    assert calabi_yau_check(weights(parse(QUINTIC)))
    assert not calabi_yau_check(weights(parse(LOOP)))


def test_fermat_completion() -> None:
    """x³ + y³ is completed by z³; x³y + y³ has no unit-fraction gap."""
    padded = fermat_completion(parse("x1^3+x2^3"))
    assert padded.exponent == 3
    assert padded.polynomial is not None
    assert calabi_yau_check(weights(padded.polynomial))
    assert fermat_completion(parse("x1^3*x2+x2^3")).exponent is None


def test_atomic_classification() -> None:
    """Loop and chain atoms with canonical variable order; Fermat summands split."""
    (loop,) = classify_atomic(parse(LOOP))
    assert (loop.kind, loop.exponents) == (AtomKind.LOOP, (3, 3))
    (chain,) = classify_atomic(parse(CHAIN))
    assert (chain.kind, chain.variables, chain.exponents) == (AtomKind.CHAIN, (0, 1), (2, 2))
    mixed = classify_atomic(parse("x1^2+x2^3*x3+x3^4"))
    assert [a.kind for a in mixed] == [AtomKind.FERMAT, AtomKind.CHAIN]
    assert mixed[1].to_dict()["variables"] == ["x2", "x3"]


def test_transpose_reverses_chain() -> None:
    """[[2,1],[0,2]]ᵀ is the chain read from x2 to x1."""
    PT = transpose_mirror(parse(CHAIN))
    assert PT.exponents == ((2, 0), (1, 2))
    (chain,) = classify_atomic(PT)
    assert chain.variables == (1, 0)


def test_undecomposable_exponent_matrix() -> None:
    """Invertible but not a sum of atoms."""
    with pytest.raises(NotDecomposable):
        classify_atomic(InvertiblePolynomial(((2, 2), (1, 3))))


def test_grading_element() -> None:
    """J has order d, is a symmetry and lies in SL for the quintic."""
    quintic = parse(QUINTIC)
    J = j_element(weights(quintic))
    assert J.order == 5
    assert is_symmetry(quintic, J)
    assert sl_check(J, quintic)
    loop = parse(LOOP)
    assert j_element(weights(loop)).order == 4
    assert not sl_check(j_element(weights(loop)), loop)


def test_sl_check_needs_a_symmetry() -> None:
    """Phases outside Aut(W) are not group elements."""
    with pytest.raises(NotGroupElement):
        sl_check(PhaseVector((Fraction(1, 7), Fraction(0))), parse(CHAIN))


def test_dual_group_extremes() -> None:
    """Aut dualizes to the trivial group and the trivial group to Aut(Wᵀ)."""
    P = parse(LOOP)
    assert dual_group(aut_group(P)).order == 1
    trivial = dual_group(DiagonalGroup(P, ()))
    assert trivial.same_elements(aut_group(transpose_mirror(P)))


@pytest.mark.parametrize("poly", ["x1^3", CHAIN, "x1^2+x2^4"])
def test_dual_of_every_subgroup(poly: str) -> None:
    """|G| |Gᵀ| = |Aut| and the double dual returns G."""
    P = parse(poly)
    aut = aut_group(P)
    for H in all_subgroups(aut):
        HT = dual_group(H)
        assert H.order * HT.order == aut.order
        assert dual_group(HT).same_elements(H)


def test_non_symmetry_generator_refused() -> None:
    """Generators must preserve every monomial."""
    with pytest.raises(NotSubgroup):
        DiagonalGroup(parse(CHAIN), (PhaseVector((Fraction(1, 3), Fraction(0))),))


def test_analyze_quintic() -> None:
    """JSON summary of the quintic."""
    summary = analyze(QUINTIC)
    assert summary["cy"] is True
    assert summary["weights"] == ["1/5"] * 5
    assert summary["autOrder"] == 3125
    assert summary["slJ"] is True
    assert summary["transpose"] == QUINTIC


def test_dual_summary() -> None:
    """The order-two subgroup of x1^2 + x2^4 dualizes to a group of order four."""
    summary = dual("x1^2+x2^4", "1/2,1/2")
    assert summary["group"]["order"] == 2
    assert summary["dual"]["order"] == 4
    assert summary["autOrder"] == 8


def test_parse_generators() -> None:
    """Empty text means the trivial group; lengths must agree."""
    assert parse_generators("") == ()
    assert parse_generators("1/3,0; 0,1/2")[1] == PhaseVector((Fraction(0), Fraction(1, 2)))
    with pytest.raises(ParseError):
        parse_generators("1/2;1/2,0")


def test_suite_smoke(tmp_path: Path) -> None:
    """Every bhk check passes at smoke sizes."""
    report = BHKSuite(smoke_config(tmp_path)).run()
    assert report.passed, failed_checks(report)

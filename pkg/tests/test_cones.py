"""Tests for the symmetric cone models."""

import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobforge.cones.geometry import (
    cone_curvature,
    cone_potential,
    geodesic,
    geodesic_rk4,
    plane_curvature,
    sectional_curvature,
)
from frobforge.cones.jordan import jordan_product, lie_triple_check, trace_form
from frobforge.cones.models.cone_point import (
    ConePoint,
    GroundField,
    TangentVector,
    realify_complex,
)
from frobforge.cones.suite import (
    ConeSuite,
    random_complex_matrix,
    random_cone_point,
    random_tangent,
    unit_matrix,
)
from frobforge.cones.verifier import flat_locus_verify, full_chart_wdvv
from frobforge.utils.errors import DegeneratePlane, NotInCone, ShapeMismatch
from frobforge.utils.sampling import rng
from tests.utils import failed_checks, smoke_config

entries = st.floats(-10.0, 10.0, allow_nan=False, allow_subnormal=False)


@given(st.sampled_from(list(GroundField)), st.data())
@settings(max_examples=60, deadline=None)
def test_jordan_trace_associativity(field: GroundField, data: st.DataObject) -> None:
    """⟨U ∘ V, W⟩ = ⟨U, V ∘ W⟩ on Hermitian 3 x 3 matrices over every field."""
    dim = field.chart_dim(3)
    coords = st.lists(entries, min_size=dim, max_size=dim)
    U, V, W = (
        TangentVector.from_coords(field, 3, np.array(data.draw(coords))) for _ in range(3)
    )
    left = trace_form(jordan_product(U, V), W)
    right = trace_form(U, jordan_product(V, W))
    scale = math.prod(float(np.linalg.norm(X.matrix)) for X in (U, V, W))
    assert abs(left - right) <= 1e-12 * max(1.0, scale)


def test_indefinite_matrix_rejected() -> None:
    """diag(1, -1) is not in the cone."""
    with pytest.raises(NotInCone):
        ConePoint(GroundField.R, 2, np.diag([1.0, -1.0]))


def test_cone_point_round_trip() -> None:
    """Quaternionic points survive to_dict/from_dict."""
    X = random_cone_point(2, GroundField.H, rng(3))
    Y = ConePoint.from_dict(X.to_dict())
    assert np.allclose(X.matrix, Y.matrix)


def test_sectional_curvature_signs() -> None:
    """Diagonal planes are flat; E11 with E12 + E21 is strictly negative."""
    I = ConePoint.identity(GroundField.R, 2)
    E11 = unit_matrix(2, {(0, 0): 1.0})
    assert abs(sectional_curvature(I, E11, unit_matrix(2, {(1, 1): 1.0}))) < 1e-9
    assert sectional_curvature(I, E11, unit_matrix(2, {(0, 1): 1.0})) < -1e-6


def test_degenerate_plane() -> None:
    """Parallel tangent vectors do not span a plane."""
    I = ConePoint.identity(GroundField.R, 2)
    E11 = unit_matrix(2, {(0, 0): 1.0})
    with pytest.raises(DegeneratePlane):
        sectional_curvature(I, E11, E11 * 2.0)


def test_cone_potential_refuses_negative_determinant() -> None:
    """A matrix slipped past validation with det < 0 has no log det."""
    X = ConePoint.identity(GroundField.R, 2)
    object.__setattr__(X, "matrix", np.diag([1.0, -1.0]))
    with pytest.raises(NotInCone):
        cone_potential(X)


def test_cone_potential_at_identity_is_zero() -> None:
    """log det I = 0 on every field."""
    for field in GroundField:
        assert cone_potential(ConePoint.identity(field, 2)) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_quaternion_planes_are_non_positive(n: int) -> None:
    """Random planes of P_n(H) have K <= 0 and some are strictly negative."""
    gen = rng(21, n)
    X = random_cone_point(n, GroundField.H, gen)
    g, Rm = cone_curvature(X)
    curvatures = [
        plane_curvature(g, Rm, *(random_tangent(n, GroundField.H, gen).coords for _ in range(2)))
        for _ in range(10)
    ]
    assert max(curvatures) <= 1e-9
    assert min(curvatures) < -1e-6


def test_plane_curvature_matches_sectional_curvature() -> None:
    """The cached-tensor form agrees with the one-shot form on a complex cone."""
    gen = rng(22)
    X = random_cone_point(3, GroundField.C, gen)
    U, V = random_tangent(3, GroundField.C, gen), random_tangent(3, GroundField.C, gen)
    g, Rm = cone_curvature(X)
    expected = sectional_curvature(X, U, V)
    assert plane_curvature(g, Rm, U.coords, V.coords) == pytest.approx(expected, rel=1e-12)


def test_complex_realification() -> None:
    """[[Re, -Im], [Im, Re]] turns products into products and adjoints into transposes."""
    gen = rng(23)
    A, B = random_complex_matrix(3, gen), random_complex_matrix(3, gen)
    assert np.allclose(realify_complex(A @ B), realify_complex(A) @ realify_complex(B))
    assert np.allclose(realify_complex(A.conj().T), realify_complex(A).T)
    assert realify_complex(np.eye(2)).tolist() == np.eye(4).tolist()


def test_geodesic_closed_form_against_rk4() -> None:
    """The closed-form geodesic solves X'' = X' X⁻¹ X'."""
    X = ConePoint.identity(GroundField.R, 2)
    U = unit_matrix(2, {(0, 1): 1.0})
    assert np.max(np.abs(geodesic(X, U, 0.5).matrix - geodesic_rk4(X, U, 0.5))) < 1e-6


def test_geodesic_shape_mismatch() -> None:
    """Tangent vectors must belong to the base point's cone."""
    X = ConePoint.identity(GroundField.R, 3)
    with pytest.raises(ShapeMismatch):
        geodesic(X, unit_matrix(2, {(0, 0): 1.0}), 1.0)


def test_lie_triple_systems() -> None:
    """Diagonal matrices form a Lie triple system; E11 with E12 + E21 does not."""
    diagonal = [unit_matrix(3, {(i, i): 1.0}) for i in range(3)]
    assert lie_triple_check(diagonal)
    assert not lie_triple_check([unit_matrix(2, {(0, 0): 1.0}), unit_matrix(2, {(0, 1): 1.0})])


@pytest.mark.parametrize(
    ("n", "field"),
    [(n, f) for f in (GroundField.R, GroundField.C) for n in (2, 3, 4)] + [(2, GroundField.H)],
)
def test_flat_locus(n: int, field: GroundField) -> None:
    """The real-diagonal torus is flat, associative and totally geodesic."""
    report = flat_locus_verify(n, field, samples=5)
    assert report.passed, failed_checks(report)


def test_full_chart_is_not_associative() -> None:
    """Off the diagonal the WDVV residual is visibly nonzero."""
    X = ConePoint(GroundField.C, 2, np.array([[2.0, 0.5 + 0.5j], [0.5 - 0.5j, 1.0]]))
    assert full_chart_wdvv(X) > 1e-3


def test_suite_single_field(tmp_path: Path) -> None:
    """The suite runs on one field and size."""
    report = ConeSuite(smoke_config(tmp_path), (GroundField.R,), 3).run()
    assert report.passed, failed_checks(report)

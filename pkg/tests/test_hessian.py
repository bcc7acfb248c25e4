"""Tests for the Hessian tensor pipeline, residuals and potential families."""

import json
from pathlib import Path

import numpy as np
import pytest

from frobforge.cones.models.cone_point import GroundField, coords_from_matrix
from frobforge.hessian import families
from frobforge.hessian.models.fields import VectorField
from frobforge.hessian.pipeline import (
    curvature_direct,
    curvature_from_A,
    eval_amplitude,
    eval_metric,
    frobenius_pairing_residual,
    integrate_geodesic,
    levi_civita_curvature,
    wdvv_residual,
)
from frobforge.hessian.residuals import (
    affine_field_check,
    codazzi_residual,
    fit_euler_beta,
    identity_field_residual,
)
from frobforge.hessian.suite import HessianSuite
from frobforge.utils.errors import DomainError, SingularMetric, UsageError
from frobforge.utils.sampling import rng
from tests.utils import failed_checks, random_spd, smoke_config

POINT = np.array([0.3, -0.2, 0.5])


@pytest.fixture
def spd_coords() -> np.ndarray:
    """Chart coordinates of a random point of P_2(R)."""
    return coords_from_matrix(random_spd(2, rng(7)), 2, GroundField.R)


def test_quadratic_is_flat() -> None:
    """A quadratic potential has vanishing amplitude, curvature and WDVV residual."""
    p = families.quadratic(3)
    g, A = eval_metric(p, POINT), eval_amplitude(p, POINT)
    assert np.array_equal(g.entries, np.eye(3))
    assert curvature_from_A(g, A).norm() == 0.0
    assert wdvv_residual(g, A).norm() == 0.0


def test_diagonal_potential_is_associative() -> None:
    """-Σ log x_i has a diagonal amplitude, so the product is associative."""
    p = families.neg_log(3)
    x = np.array([0.5, 1.0, 2.0])
    g, A = eval_metric(p, x), eval_amplitude(p, x)
    assert wdvv_residual(g, A).norm() < 1e-12
    assert curvature_from_A(g, A).norm() < 1e-12


def test_curved_potential_fails_wdvv() -> None:
    """exp(|x|²/2) is curved away from the origin and not associative."""
    p = families.exp_quadratic(3)
    g, A = eval_metric(p, POINT), eval_amplitude(p, POINT)
    assert curvature_from_A(g, A).norm() > 1e-3
    assert wdvv_residual(g, A).norm() > 1e-3


def test_pairing_identity_holds() -> None:
    """g(a o b, c) = A(a, b, c) for any Hessian data."""
    p = families.exp_quadratic(3)
    g, A = eval_metric(p, POINT), eval_amplitude(p, POINT)
    assert frobenius_pairing_residual(g, A) < 1e-10


def test_curvature_symmetries() -> None:
    """The amplitude curvature has the algebraic symmetries of a Riemann tensor."""
    p = families.exp_quadratic(3)
    R = curvature_from_A(eval_metric(p, POINT), eval_amplitude(p, POINT))
    assert R.symmetry_defect() < 1e-10


def test_levi_civita_matches_direct(spd_coords: np.ndarray) -> None:
    """Curvature from the amplitude agrees with differenced Christoffel symbols."""
    p = families.log_det(2, "R")
    g, A = eval_metric(p, spd_coords), eval_amplitude(p, spd_coords)
    direct = curvature_direct(p, spd_coords).entries
    gap = np.max(np.abs(levi_civita_curvature(g, A).entries - direct))
    assert gap / max(1.0, float(np.max(np.abs(direct)))) < 1e-5


def test_identity_field_of_log_det(spd_coords: np.ndarray) -> None:
    """-x/2 is the unit of the product for -log det."""
    p = families.log_det(2, "R")
    e = VectorField.radial(3, -0.5)
    assert identity_field_residual(p, e, spd_coords) < 1e-10


def test_radial_field_is_euler_with_zero_beta(spd_coords: np.ndarray) -> None:
    """The dilation field satisfies the Euler relation with β = 0."""
    beta, residual = fit_euler_beta(VectorField.radial(3), families.log_det(2, "R"), spd_coords)
    assert abs(beta) < 1e-5
    assert residual < 1e-5


def test_affine_field_check() -> None:
    """Affine fields pass and a quadratic component is flagged."""
    points = [POINT, 2 * POINT]
    assert affine_field_check(VectorField.radial(3), points)
    square = VectorField(3, lambda x: np.array([x[0] ** 2, 0.0, 0.0]))
    assert not affine_field_check(square, points)


def test_codazzi_flags_the_kink() -> None:
    """Fourth derivatives of |x| y³/6 jump across x = 0."""
    assert codazzi_residual(families.kink(), np.array([1e-4, 1.0]), 3) > 1e-2


def test_geodesic_of_flat_metric_is_a_line() -> None:
    """Christoffel symbols vanish for a quadratic potential."""
    p = families.quadratic(2)
    x0, v0 = np.array([0.1, 0.2]), np.array([1.0, -0.5])
    assert np.allclose(integrate_geodesic(p, x0, v0, 2.0, steps=10), x0 + 2.0 * v0)


def test_domain_and_singularity_errors() -> None:
    """Points off the domain and singular Hessians are refused."""
    with pytest.raises(DomainError):
        families.neg_log(2).derivative(np.array([-1.0, 1.0]), 2)
    degenerate = families.quadratic(2, [[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(SingularMetric):
        eval_metric(degenerate, np.zeros(2))


def test_registry_suggests_close_names() -> None:
    """A misspelt family is refused with a suggestion."""
    with pytest.raises(UsageError, match="did you mean 'quadratic'"):
        families.registry.create("quadratc")


def test_potential_spec_file(tmp_path: Path) -> None:
    """Declarative specs build finite-difference potentials."""
    path = tmp_path / "potential.json"
    spec = {"family": "exp_quadratic", "params": {"dim": 2}, "mode": "finite-difference"}
    path.write_text(json.dumps(spec), encoding="utf-8")
    p = families.load_potential_spec(path)
    assert p.dim == 2
    assert p.mode == "finite-difference"


def test_suite_smoke(tmp_path: Path) -> None:
    """Every hessian check passes at smoke sizes."""
    report = HessianSuite(smoke_config(tmp_path)).run()
    assert report.passed, failed_checks(report)

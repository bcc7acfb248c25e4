"""Tests for discrete Brenier couplings, pushforwards and configuration matchings."""

import logging
from pathlib import Path

import numpy as np
import pytest

from frobforge.transport.brenier import (
    brenier_discrete,
    displacement_interpolate,
    gaussian_linear_map,
    is_monotone_1d,
    legendre_dual,
    map_rms_error,
    plan_interpolate,
    pushforward,
)
from frobforge.transport.configuration import brute_force_matching, config_path, config_transport
from frobforge.transport.models.grid import ConvexPotentialGrid, Grid2D, GridDensity
from frobforge.transport.models.plan import EmpiricalMeasure, Matching
from frobforge.transport.suite import (
    OptimalTransportSuite,
    anisotropic_pair,
    random_atoms,
    shifted_quadratic,
    translation,
)
from frobforge.utils.errors import (
    DiagonalViolation,
    MassMismatch,
    ParamOutOfRange,
    ShapeMismatch,
    SizeMismatch,
)
from frobforge.utils.sampling import rng
from tests.utils import failed_checks, slow, smoke_config


@pytest.fixture
def atoms() -> tuple[EmpiricalMeasure, EmpiricalMeasure]:
    """Two random six-atom measures of unit mass."""
    gen = rng(11)
    return random_atoms(6, gen), random_atoms(6, gen)


def test_self_transport_costs_nothing(atoms: tuple[EmpiricalMeasure, EmpiricalMeasure]) -> None:
    """μ -> μ is the identity coupling."""
    mu, _ = atoms
    result = brenier_discrete(mu, mu)
    assert result.cost < 1e-12
    assert np.allclose(result.map, mu.points)


def test_single_atom_is_translated() -> None:
    """One atom of mass m moved by (1, 2) costs 5 m."""
    a = EmpiricalMeasure(np.array([[0.0, 0.0]]), [0.7])
    b = EmpiricalMeasure(np.array([[1.0, 2.0]]), [0.7])
    assert brenier_discrete(a, b).cost == pytest.approx(3.5)


def test_lp_marginals_are_exact(atoms: tuple[EmpiricalMeasure, EmpiricalMeasure]) -> None:
    """Network simplex reproduces both marginals to rounding."""
    result = brenier_discrete(*atoms, method="exact-lp")
    assert result.plan.marginal_error() < 1e-12


def test_sinkhorn_approaches_lp(atoms: tuple[EmpiricalMeasure, EmpiricalMeasure]) -> None:
    """The annealed entropic cost is close to the LP cost."""
    lp = brenier_discrete(*atoms, method="exact-lp")
    sk = brenier_discrete(*atoms, method="sinkhorn")
    assert abs(sk.cost - lp.cost) < 1e-4
    assert sk.plan.marginal_error() < 1e-7


def test_target_rescale_is_logged(caplog: pytest.LogCaptureFixture) -> None:
    """Tiny mass drift is absorbed into the target and reported at debug level."""
    a = EmpiricalMeasure(np.zeros((1, 2)), [1.0])
    b = EmpiricalMeasure(np.ones((1, 2)), [1.0 + 1e-12])
    with caplog.at_level(logging.DEBUG, logger="frobforge.transport.brenier"):
        result = brenier_discrete(a, b)
    assert result.plan.pi.sum() == pytest.approx(1.0, abs=1e-15)
    assert "Rescaling target masses" in caplog.text


def test_mass_and_dimension_mismatch() -> None:
    """Totals must agree and atoms must share a dimension."""
    a = EmpiricalMeasure(np.zeros((2, 2)), [0.5, 0.5])
    with pytest.raises(MassMismatch):
        brenier_discrete(a, EmpiricalMeasure(np.ones((2, 2)), [0.5, 0.6]))
    with pytest.raises(ShapeMismatch):
        brenier_discrete(a, EmpiricalMeasure(np.ones((2, 3)), [0.5, 0.5]))


def test_unknown_method_and_bad_epsilon(
    atoms: tuple[EmpiricalMeasure, EmpiricalMeasure],
) -> None:
    """Methods are named and epsilon is positive."""
    with pytest.raises(ParamOutOfRange):
        brenier_discrete(*atoms, method="simplex")  # type: ignore[arg-type]
    with pytest.raises(ParamOutOfRange):
        brenier_discrete(*atoms, method="sinkhorn", epsilon=0.0)


def test_one_dimensional_maps_are_monotone() -> None:
    """Sorted quantile coupling on the line."""
    gen = rng(12)
    a = EmpiricalMeasure(gen.normal(size=25), gen.dirichlet(np.ones(25)))
    b = EmpiricalMeasure(gen.normal(1.0, 2.0, size=20), gen.dirichlet(np.ones(20)))
    assert is_monotone_1d(brenier_discrete(a, b))


def test_gaussian_linear_map() -> None:
    """diag(1, 1/4) -> diag(1/4, 1) is diag(1/2, 2)."""
    A = gaussian_linear_map(np.diag([1.0, 0.25]), np.diag([0.25, 1.0]))
    assert np.allclose(A, np.diag([0.5, 2.0]))


def test_anisotropic_gaussian_map_atom_by_atom() -> None:
    """Barycentric images stay within 3% RMS of diag(1/2, 2) without any fitting."""
    mu, nu = anisotropic_pair()
    assert mu.grid.points.shape[0] <= 1000
    assert nu.grid.points.shape[0] <= 1000
    result = brenier_discrete(mu, nu)
    A = np.diag([0.5, 2.0])
    assert map_rms_error(result, lambda x: x @ A.T) < 0.03


def test_map_rms_error_sees_a_wrong_map() -> None:
    """Comparing against the transpose of the true map is far off."""
    result = brenier_discrete(*anisotropic_pair())
    swapped = np.diag([2.0, 0.5])
    assert map_rms_error(result, lambda x: x @ swapped.T) > 0.5


def test_legendre_dual_of_shifted_quadratic() -> None:
    """|x|²/2 + s·x has conjugate |y - s|²/2 on nodes whose shift stays in the box."""
    grid = Grid2D(32, 32, (-4.0, 4.0, -4.0, 4.0))
    s = np.array([0.5, 0.25])
    U = ConvexPotentialGrid(grid, grid.evaluate(lambda X, Y: shifted_quadratic(X, Y, s)))
    V = legendre_dual(U)
    X, Y = grid.mesh
    reachable = grid.contains(X - s[0], Y - s[1])
    exact = 0.5 * ((X - s[0]) ** 2 + (Y - s[1]) ** 2)
    assert reachable.sum() > 0.8 * reachable.size
    assert np.allclose(V[reachable], exact[reachable], atol=1e-10)
    assert np.all(U.u + V >= X**2 + Y**2 - 1e-10)


def test_grid_contains_is_closed() -> None:
    """Corners count as inside; anything past an edge does not."""
    grid = Grid2D(4, 4, (-1.0, 1.0, 0.0, 2.0))
    inside = grid.contains(np.array([-1.0, 1.0, 0.0, 1.5]), np.array([0.0, 2.0, 3.0, 1.0]))
    assert inside.tolist() == [True, True, False, False]


def test_pushforward_identity_and_translation() -> None:
    """The identity fixes μ; a lattice shift moves every node mass by whole cells."""
    grid = Grid2D(16, 16, (-3.0, 3.0, -3.0, 3.0))
    mu = GridDensity.gaussian(grid, (0.0, 0.0), (0.5, 0.5)).normalized()
    assert np.allclose(pushforward(lambda pts: pts, mu).mass, mu.mass)
    moved = pushforward(translation((grid.h, 0.0)), mu)
    assert np.allclose(moved.mass[1:-1, :], mu.mass[:-2, :])


def test_pushforward_of_plan_is_target_marginal(
    atoms: tuple[EmpiricalMeasure, EmpiricalMeasure],
) -> None:
    """A coupling pushes its source onto its column marginal."""
    mu, nu = atoms
    pushed = pushforward(brenier_discrete(mu, nu), mu)
    assert np.allclose(pushed.masses, nu.masses, atol=1e-12)


def test_undefined_map_on_support() -> None:
    """NaN images of atoms with mass are refused."""
    grid = Grid2D(8, 8)
    mu = GridDensity.from_function(grid, lambda X, Y: np.ones_like(X))
    with pytest.raises(ValueError, match="undefined"):
        pushforward(lambda pts: np.full_like(pts, np.nan), mu)


def test_displacement_interpolation_endpoints() -> None:
    """t = 0 reproduces μ and times outside [0, 1] are refused."""
    grid = Grid2D(12, 12, (-3.0, 3.0, -3.0, 3.0))
    mu = GridDensity.gaussian(grid, (0.0, 0.0), (1.0, 1.0)).normalized()
    T = translation((2 * grid.h, 0.0))
    assert np.allclose(displacement_interpolate(mu, T, 0.0).mass, mu.mass)
    half = displacement_interpolate(mu, T, 0.5)
    assert half.total == pytest.approx(mu.total, abs=1e-9)
    with pytest.raises(ParamOutOfRange):
        displacement_interpolate(mu, T, 1.5)


def test_plan_interpolation(atoms: tuple[EmpiricalMeasure, EmpiricalMeasure]) -> None:
    """The interpolant keeps mass and its mean moves linearly."""
    mu, nu = atoms
    plan = brenier_discrete(mu, nu).plan
    mid = plan_interpolate(plan, 0.5)
    assert mid.total == pytest.approx(1.0)
    assert np.allclose(mid.mean(), 0.5 * (mu.mean() + nu.mean()))
    assert np.allclose(plan_interpolate(plan, 1.0).mean(), nu.mean())
    with pytest.raises(ParamOutOfRange):
        plan_interpolate(plan, -0.1)


def test_config_transport_matches_brute_force() -> None:
    """The assignment solver finds the cheapest permutation."""
    gen = rng(13)
    for m in range(1, 6):
        a, b = gen.normal(size=(m, 2)), gen.normal(size=(m, 2))
        assert config_transport(a, b).cost == pytest.approx(brute_force_matching(a, b).cost)


def test_config_transport_recovers_permutation() -> None:
    """Matching a configuration with a permutation of itself costs nothing."""
    a = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 3.0], [2.0, 2.0]])
    match = config_transport(a, a[[2, 0, 3, 1]])
    assert match == Matching((1, 3, 0, 2), 0.0)
    assert np.allclose(config_path(a, a[[2, 0, 3, 1]], 1.0, match), a)


def test_config_preconditions() -> None:
    """Configurations have equal size and distinct points."""
    a = np.array([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(SizeMismatch):
        config_transport(a, a[:1])
    with pytest.raises(DiagonalViolation):
        config_transport(np.zeros((2, 2)), a)
    with pytest.raises(ParamOutOfRange):
        brute_force_matching(np.arange(8.0), np.arange(8.0) + 1)


@slow
def test_suite_smoke(tmp_path: Path) -> None:
    """Every coupling check passes at smoke sizes."""
    report = OptimalTransportSuite(smoke_config(tmp_path)).run()
    assert report.passed, failed_checks(report)

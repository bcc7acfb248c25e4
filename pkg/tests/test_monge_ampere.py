"""Tests for the Monge-Ampere solver and its residuals."""

import numpy as np
import pytest

from frobforge.transport.models.grid import ConvexPotentialGrid, Grid2D, GridDensity
from frobforge.transport.monge_ampere import (
    convergence_order,
    exponential_solution,
    ma_residual_norm,
    ma_solve,
    max_error,
    quadratic_solution,
)
from frobforge.utils.errors import NonPositiveRHS, ParamOutOfRange, ShapeMismatch
from tests.utils import slow


def test_quadratic_solution_is_reproduced() -> None:
    """|x|²/2 solves det D²u = 1 exactly with centered differences."""
    grid = Grid2D(8, 8)
    exact, f = quadratic_solution()
    u = ma_solve(f, exact, grid)
    assert max_error(u, exact) < 1e-8
    assert u.is_convex()


def test_residual_of_exact_quadratic_is_zero() -> None:
    """The discrete operator is exact on quadratics."""
    grid = Grid2D(10, 10)
    exact, f = quadratic_solution()
    assert ma_residual_norm(ConvexPotentialGrid(grid, grid.evaluate(exact)), f) < 1e-10


def test_manufactured_solution_converges() -> None:
    """Errors on exp(|x|²/2) shrink when the grid is refined."""
    exact, f = exponential_solution()
    errors, steps = [], []
    for n in (8, 16):
        grid = Grid2D(n, n)
        u = ma_solve(f, exact, grid)
        assert u.residual <= 1e-6
        errors.append(max_error(u, exact))
        steps.append(grid.h)
    assert errors[1] < errors[0]


@slow
def test_second_order_convergence() -> None:
    """Halving h divides the error by roughly four."""
    exact, f = exponential_solution()
    grids = [Grid2D(n, n) for n in (16, 32)]
    errors = [max_error(ma_solve(f, exact, g), exact) for g in grids]
    fit = convergence_order(errors, [g.h for g in grids])
    assert 3.0 <= fit.ratios[0] <= 5.0


def test_convergence_order_fit() -> None:
    """Exact h² errors give slope 2."""
    steps = [0.1, 0.05, 0.025]
    fit = convergence_order([h**2 for h in steps], steps)
    assert fit.order == pytest.approx(2.0)
    assert fit.ratios == pytest.approx((4.0, 4.0))


def test_non_positive_rhs_refused() -> None:
    """f must be positive on every interior node."""
    grid = Grid2D(8, 8)
    exact, f = quadratic_solution()
    values = grid.evaluate(f)
    values[3, 4] = 0.0
    with pytest.raises(NonPositiveRHS):
        ma_solve(values, exact, grid)


def test_array_rhs_needs_grid() -> None:
    """A bare array does not say where it lives."""
    exact, _ = quadratic_solution()
    with pytest.raises(ShapeMismatch):
        ma_solve(np.ones((9, 9)), exact)


def test_density_rhs_carries_its_grid() -> None:
    """A GridDensity right-hand side supplies the grid."""
    grid = Grid2D(8, 8)
    exact, f = quadratic_solution()
    u = ma_solve(GridDensity.from_function(grid, f), exact)
    assert max_error(u, exact) < 1e-8


def test_residual_grows_with_perturbation() -> None:
    """Larger convex-breaking bumps give larger residuals."""
    grid = Grid2D(16, 16)
    exact, f = quadratic_solution()
    X, Y = grid.mesh
    bump = np.sin(np.pi * X) * np.sin(np.pi * Y)
    base = grid.evaluate(exact)
    norms = [ma_residual_norm(ConvexPotentialGrid(grid, base + e * bump), f) for e in (1e-3, 1e-1)]
    assert norms[0] < norms[1]


def test_grid_validation() -> None:
    """Too few cells and non-uniform spacing are refused."""
    with pytest.raises(ParamOutOfRange):
        Grid2D(1, 4)
    with pytest.raises(ShapeMismatch):
        Grid2D(4, 4, (0.0, 1.0, 0.0, 2.0))


def test_domain_predicate_marks_interior() -> None:
    """A disc domain leaves corner nodes outside the interior."""
    grid = Grid2D(20, 20, (-1.0, 1.0, -1.0, 1.0), domain=lambda X, Y: X**2 + Y**2 < 0.8)
    interior = grid.interior()
    assert interior[10, 10]
    assert not interior[0, 0]

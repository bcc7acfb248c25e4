"""Tests for density and coupling files."""

from pathlib import Path

import numpy as np
import pytest

from frobforge.transport.brenier import brenier_discrete
from frobforge.transport.io import (
    read_density_binary,
    read_density_csv,
    read_plan_triplets,
    write_density_binary,
    write_density_csv,
    write_plan_triplets,
)
from frobforge.transport.models.grid import Grid2D, GridDensity
from frobforge.transport.suite import random_atoms
from frobforge.utils.errors import ReportIOError, ShapeMismatch
from frobforge.utils.sampling import rng


@pytest.fixture
def density() -> GridDensity:
    """Gaussian on a 6 x 4 cell grid with unequal sides."""
    grid = Grid2D(6, 4, (-1.5, 1.5, 0.0, 2.0))
    return GridDensity.gaussian(grid, (0.2, 1.0), (0.5, 0.25))


def test_density_csv(tmp_path: Path, density: GridDensity) -> None:
    """CSV keeps the grid and the nodal values."""
    back = read_density_csv(write_density_csv(density, tmp_path / "rho.csv"))
    assert back.grid.shape == density.grid.shape
    assert np.allclose(back.grid.bounds, density.grid.bounds)
    assert np.allclose(back.mass, density.mass, rtol=1e-11)


def test_density_binary(tmp_path: Path, density: GridDensity) -> None:
    """Raw float64 values come back bit for bit."""
    path = write_density_binary(density, tmp_path / "rho.bin")
    assert path.with_suffix(".json").exists()
    assert path.stat().st_size == 8 * density.mass.size
    assert np.array_equal(read_density_binary(path).mass, density.mass)


def test_truncated_binary(tmp_path: Path, density: GridDensity) -> None:
    """A short value file does not fill the grid."""
    path = write_density_binary(density, tmp_path / "rho.bin")
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ShapeMismatch):
        read_density_binary(path)


def test_csv_with_missing_column(tmp_path: Path) -> None:
    """The mass column is required."""
    path = tmp_path / "rho.csv"
    path.write_text("x,y\n0,0\n", encoding="utf-8")
    with pytest.raises(ShapeMismatch, match="mass"):
        read_density_csv(path)


def test_write_into_missing_directory(tmp_path: Path, density: GridDensity) -> None:
    """Unwritable targets raise ReportIOError."""
    with pytest.raises(ReportIOError):
        write_density_csv(density, tmp_path / "missing" / "rho.csv")


def test_plan_triplets(tmp_path: Path) -> None:
    """Sparse rows rebuild the dense coupling."""
    gen = rng(21)
    plan = brenier_discrete(random_atoms(5, gen), random_atoms(4, gen)).plan
    path = write_plan_triplets(plan, tmp_path / "plan.csv")
    assert np.allclose(read_plan_triplets(path, plan.pi.shape), plan.pi, rtol=1e-11)

"""Density and coupling files: CSV, raw binary with a JSON header, and sparse triplets."""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from frobforge.transport.models.grid import Grid2D, GridDensity
from frobforge.transport.models.plan import TransportPlan
from frobforge.utils.constants import FLOAT_FORMAT
from frobforge.utils.errors import ReportIOError, ShapeMismatch

logger = logging.getLogger(__name__)

DENSITY_COLUMNS = ["x", "y", "mass"]
PLAN_COLUMNS = ["i", "j", "pi"]


def write_density_csv(density: GridDensity, path: Path | str) -> Path:
    """One row per node: x, y, mass."""
    path = Path(path)
    pts = density.grid.points
    df = pd.DataFrame({"x": pts[:, 0], "y": pts[:, 1], "mass": density.mass.ravel()})
    try:
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        logger.exception(f"Failed writing density to {path}")
        raise ReportIOError(f"Cannot write {path}: {e}") from e
    return path


def read_density_csv(path: Path | str) -> GridDensity:
    """Rebuild a density from x, y, mass rows; the nodes must form a uniform grid."""
    df = pd.read_csv(path)
    missing = set(DENSITY_COLUMNS) - set(df.columns)
    if missing:
        raise ShapeMismatch(f"{path}: missing columns {sorted(missing)}")
    xs, ys = np.unique(df["x"].to_numpy()), np.unique(df["y"].to_numpy())
    if len(df) != xs.size * ys.size:
        raise ShapeMismatch(f"{path}: {len(df)} rows do not fill a {xs.size}x{ys.size} grid")
    grid = Grid2D(xs.size - 1, ys.size - 1, (xs[0], xs[-1], ys[0], ys[-1]))
    ordered = df.sort_values(["x", "y"])
    mass = ordered["mass"].to_numpy(dtype=float).reshape(grid.shape)
    logger.debug(f"Read {grid.nx}x{grid.ny} density from {path}")
    return GridDensity(grid, mass)


def _header_path(path: Path) -> Path:
    return path.with_suffix(".json")


def write_density_binary(density: GridDensity, path: Path | str) -> Path:
    """Row-major little-endian float64 values plus a JSON header next to them."""
    path = Path(path)
    header = {**density.grid.to_dict(), "dtype": "<f8", "order": "C"}
    try:
        density.mass.astype("<f8").tofile(path)
        _header_path(path).write_text(json.dumps(header, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        logger.exception(f"Failed writing density to {path}")
        raise ReportIOError(f"Cannot write {path}: {e}") from e
    return path


def read_density_binary(path: Path | str) -> GridDensity:
    """Inverse of ``write_density_binary``."""
    path = Path(path)
    header = json.loads(_header_path(path).read_text(encoding="utf-8"))
    grid = Grid2D.from_dict(header)
    values = np.fromfile(path, dtype=header.get("dtype", "<f8"))
    if values.size != grid.shape[0] * grid.shape[1]:
        raise ShapeMismatch(f"{path}: {values.size} values for a {grid.shape} grid")
    return GridDensity(grid, values.reshape(grid.shape, order=header.get("order", "C")))


def write_plan_triplets(plan: TransportPlan, path: Path | str, threshold: float = 0.0) -> Path:
    """Nonzero coupling entries as i, j, pi rows."""
    path = Path(path)
    t = plan.triplets(threshold)
    df = pd.DataFrame({"i": t[:, 0].astype(int), "j": t[:, 1].astype(int), "pi": t[:, 2]})
    try:
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        logger.exception(f"Failed writing plan to {path}")
        raise ReportIOError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(df)} coupling entries to {path}")
    return path


def read_plan_triplets(path: Path | str, shape: tuple[int, int]) -> np.ndarray:
    """Dense coupling matrix from i, j, pi rows."""
    df = pd.read_csv(path)
    pi = np.zeros(shape)
    pi[df["i"].to_numpy(dtype=int), df["j"].to_numpy(dtype=int)] = df["pi"].to_numpy(dtype=float)
    return pi

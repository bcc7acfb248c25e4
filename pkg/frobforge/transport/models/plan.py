"""Weighted point clouds, couplings and matchings."""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from frobforge.transport.models.grid import GridDensity
from frobforge.utils.errors import ParamOutOfRange, ShapeMismatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Finite weighted support.

    When built from a grid density ``density`` and ``nodes`` (flat node
    indices) remember where each atom came from, so marginals can be written
    back onto the grid.
    """

    points: np.ndarray
    masses: np.ndarray
    density: GridDensity | None = field(default=None, compare=False)
    nodes: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        w = np.asarray(self.masses, dtype=float).ravel()
        if pts.shape[0] != w.size:
            raise ShapeMismatch(f"{pts.shape[0]} points but {w.size} masses")
        if w.size == 0:
            raise ParamOutOfRange("Empirical measure needs at least one atom")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ParamOutOfRange("Atom masses must be finite and nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", w)

    @classmethod
    def from_density(cls, density: GridDensity) -> "EmpiricalMeasure":
        """Atoms at the nodes with positive mass."""
        w = density.node_masses().ravel()
        nodes = np.flatnonzero(w > 0)
        return cls(density.grid.points[nodes], w[nodes], density, nodes)

    @property
    def total(self) -> float:
        """Total mass."""
        return float(self.masses.sum())

    @property
    def dim(self) -> int:
        """Ambient dimension of the atoms."""
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return int(self.masses.size)

    def mean(self) -> np.ndarray:
        """Center of mass."""
        return (self.points * self.masses[:, None]).sum(axis=0) / self.total

    def to_grid(self, masses: np.ndarray | None = None) -> GridDensity:
        """Scatter ``masses`` (default: own masses) back onto the source grid."""
        if self.density is None or self.nodes is None:
            raise ShapeMismatch("Measure was not built from a grid density")
        w = self.masses if masses is None else np.asarray(masses, dtype=float)
        grid = self.density.grid
        flat = np.zeros(grid.shape[0] * grid.shape[1])
        flat[self.nodes] = np.clip(w, 0.0, None) / grid.cell_measure
        return GridDensity(grid, flat.reshape(grid.shape))

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"points": self.points.tolist(), "masses": self.masses.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EmpiricalMeasure":
        """Create instance from dictionary."""
        return cls(np.asarray(data["points"]), np.asarray(data["masses"]))


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Coupling ``pi`` between two empirical measures and its cost."""

    source: EmpiricalMeasure
    target: EmpiricalMeasure
    pi: np.ndarray
    cost: float

    def __post_init__(self) -> None:
        pi = np.asarray(self.pi, dtype=float)
        if pi.shape != (len(self.source), len(self.target)):
            raise ShapeMismatch(
                f"Coupling shape {pi.shape} does not match supports "
                f"{len(self.source)} x {len(self.target)}"
            )
        object.__setattr__(self, "pi", pi)

    def row_marginal(self) -> np.ndarray:
        """Mass leaving each source atom."""
        return self.pi.sum(axis=1)

    def column_marginal(self) -> np.ndarray:
        """Mass arriving at each target atom."""
        return self.pi.sum(axis=0)

    def marginal_error(self) -> float:
        """Largest deviation of either marginal from the endpoint masses."""
        rows = np.max(np.abs(self.row_marginal() - self.source.masses))
        cols = np.max(np.abs(self.column_marginal() - self.target.masses))
        return float(max(rows, cols))

    def barycentric_map(self) -> np.ndarray:
        """Conditional mean of the target given each source atom."""
        rows = self.row_marginal()
        out = np.full(self.source.points.shape[:1] + self.target.points.shape[1:], np.nan)
        live = rows > 0
        out[live] = (self.pi[live] @ self.target.points) / rows[live, None]
        return out

    def triplets(self, threshold: float = 0.0) -> np.ndarray:
        """Sparse (i, j, pi_ij) rows for entries above ``threshold``."""
        i, j = np.nonzero(self.pi > threshold)
        return np.column_stack([i, j, self.pi[i, j]])

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "cost": self.cost,
            "marginal_error": self.marginal_error(),
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "triplets": self.triplets().tolist(),
        }


@dataclass(frozen=True)
class Matching:
    """Optimal bijection ``a[i] -> b[permutation[i]]`` between configurations."""

    permutation: tuple[int, ...]
    cost: float

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"permutation": list(self.permutation), "cost": self.cost}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Matching":
        """Create instance from dictionary."""
        return cls(tuple(int(i) for i in data["permutation"]), float(data["cost"]))

"""Rectangular phase-space grids and the nodal fields living on them."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Any

import numpy as np
from scipy import ndimage

from frobforge.utils.constants import CONVEXITY_SLACK
from frobforge.utils.errors import ParamOutOfRange, ShapeMismatch

logger = logging.getLogger(__name__)

PlaneFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
Bounds = tuple[float, float, float, float]

_NEIGHBOURS = np.ones((3, 3), dtype=bool)


class NodeFlag(IntEnum):
    """Role of a node for the Dirichlet problem."""

    OUTSIDE = 0
    BOUNDARY = 1
    INTERIOR = 2


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Uniform grid of (nx + 1) x (ny + 1) nodes over ``bounds = (x0, x1, y0, y1)``.

    Arrays on the grid are indexed ``[i, j]`` with x = x0 + i h and y = y0 + j h.
    With a ``domain`` predicate a node is interior when the predicate holds on
    it and on all 8 neighbours, boundary when it touches an interior node.
    """

    nx: int
    ny: int
    bounds: Bounds = (0.0, 1.0, 0.0, 1.0)
    domain: PlaneFn | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ParamOutOfRange(f"Grid needs at least 2 cells per side, got {self.nx}x{self.ny}")
        x0, x1, y0, y1 = (float(b) for b in self.bounds)
        if not (x1 > x0 and y1 > y0):
            raise ParamOutOfRange(f"Degenerate bounds {self.bounds}")
        hx, hy = (x1 - x0) / self.nx, (y1 - y0) / self.ny
        if abs(hx - hy) > 1e-9 * max(hx, hy):
            raise ShapeMismatch(f"Grid spacing must be uniform, got hx={hx} and hy={hy}")
        object.__setattr__(self, "bounds", (x0, x1, y0, y1))
        labels, count = ndimage.label(self.flags == NodeFlag.INTERIOR, structure=_NEIGHBOURS)
        if count != 1:
            raise ShapeMismatch(f"Interior nodes must form one connected set, found {count}")

    @classmethod
    def from_nodes(cls, count: int, extent: tuple[float, float]) -> "Grid2D":
        """Square grid with ``count`` nodes per side over extent x extent."""
        lo, hi = extent
        return cls(count - 1, count - 1, (lo, hi, lo, hi))

    @property
    def h(self) -> float:
        """Node spacing."""
        return (self.bounds[1] - self.bounds[0]) / self.nx

    @property
    def cell_measure(self) -> float:
        """Area weight h² carried by each node."""
        return self.h**2

    @property
    def shape(self) -> tuple[int, int]:
        """Node array shape."""
        return (self.nx + 1, self.ny + 1)

    @cached_property
    def x(self) -> np.ndarray:
        """Node abscissae."""
        return np.linspace(self.bounds[0], self.bounds[1], self.nx + 1)

    @cached_property
    def y(self) -> np.ndarray:
        """Node ordinates."""
        return np.linspace(self.bounds[2], self.bounds[3], self.ny + 1)

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) node coordinates with ``ij`` indexing."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def contains(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Whether each (x, y) lies in the closed bounding rectangle."""
        x0, x1, y0, y1 = self.bounds
        X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
        return (X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)

    @cached_property
    def points(self) -> np.ndarray:
        """All nodes as an (N, 2) array in row-major order."""
        X, Y = self.mesh
        return np.column_stack([X.ravel(), Y.ravel()])

    @cached_property
    def flags(self) -> np.ndarray:
        """``NodeFlag`` value per node."""
        X, Y = self.mesh
        if self.domain is None:
            inside = np.ones(self.shape, dtype=bool)
            inside[[0, -1], :] = False
            inside[:, [0, -1]] = False
            interior = inside
        else:
            member = np.asarray(self.domain(X, Y), dtype=bool)
            interior = ndimage.binary_erosion(member, structure=_NEIGHBOURS, border_value=0)
        touching = ndimage.binary_dilation(interior, structure=_NEIGHBOURS)
        out = np.full(self.shape, NodeFlag.OUTSIDE, dtype=np.int8)
        out[touching] = NodeFlag.BOUNDARY
        out[interior] = NodeFlag.INTERIOR
        out.setflags(write=False)
        return out

    def interior(self) -> np.ndarray:
        """Boolean mask of interior nodes."""
        return self.flags == NodeFlag.INTERIOR

    def evaluate(self, fn: PlaneFn) -> np.ndarray:
        """Sample a function of (x, y) on every node."""
        X, Y = self.mesh
        return np.broadcast_to(np.asarray(fn(X, Y), dtype=float), self.shape).copy()

    def fractional_index(self, pts: np.ndarray) -> np.ndarray:
        """Continuous (i, j) index of arbitrary points."""
        origin = np.array([self.bounds[0], self.bounds[2]])
        return (np.asarray(pts, dtype=float) - origin) / self.h

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"nx": self.nx, "ny": self.ny, "bounds": list(self.bounds)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Grid2D":
        """Create instance from dictionary."""
        bounds = tuple(float(b) for b in data["bounds"])
        return cls(int(data["nx"]), int(data["ny"]), bounds)  # type: ignore[arg-type]


def _check_field(grid: Grid2D, values: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != grid.shape:
        raise ShapeMismatch(f"{what} has shape {arr.shape}, grid expects {grid.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Nonnegative nodal density; node (i, j) carries mass ``mass[i, j] * h²``.

    ``source`` optionally keeps the analytic density the nodes were sampled
    from, for evaluation between nodes.
    """

    grid: Grid2D
    mass: np.ndarray
    source: PlaneFn | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        arr = _check_field(self.grid, self.mass, "Density").copy()
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ParamOutOfRange("Density values must be finite and nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "mass", arr)

    @classmethod
    def from_function(cls, grid: Grid2D, fn: PlaneFn) -> "GridDensity":
        """Sample an analytic density on the nodes."""
        return cls(grid, grid.evaluate(fn), fn)

    @classmethod
    def gaussian(
        cls, grid: Grid2D, mean: tuple[float, float], cov: np.ndarray | tuple[float, float]
    ) -> "GridDensity":
        """Normal density with the given mean and (diagonal or full) covariance."""
        C = np.diag(cov) if np.ndim(cov) == 1 else np.asarray(cov, dtype=float)
        P = np.linalg.inv(C)
        norm = 1.0 / (2 * np.pi * np.sqrt(np.linalg.det(C)))
        mx, my = mean

        def density(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
            dx, dy = X - mx, Y - my
            quad = P[0, 0] * dx * dx + 2 * P[0, 1] * dx * dy + P[1, 1] * dy * dy
            return norm * np.exp(-0.5 * quad)

        return cls.from_function(grid, density)

    @property
    def total(self) -> float:
        """Σ mass · h²."""
        return float(np.sum(self.mass) * self.grid.cell_measure)

    def node_masses(self) -> np.ndarray:
        """Mass carried by each node."""
        return self.mass * self.grid.cell_measure

    def normalized(self) -> "GridDensity":
        """Copy with total mass 1."""
        total = self.total
        if not total > 0:
            raise ParamOutOfRange("Cannot normalize a density with zero mass")
        source = self.source
        scaled = None if source is None else (lambda X, Y: source(X, Y) / total)
        return GridDensity(self.grid, self.mass / total, scaled)

    def mean(self) -> np.ndarray:
        """Center of mass."""
        w = self.node_masses().ravel()
        return (self.grid.points * w[:, None]).sum(axis=0) / w.sum()

    def at(self, pts: np.ndarray) -> np.ndarray:
        """Density between nodes: the analytic source if known, else bilinear interpolation."""
        pts = np.atleast_2d(pts)
        if self.source is not None:
            return np.asarray(self.source(pts[:, 0], pts[:, 1]), dtype=float)
        idx = self.grid.fractional_index(pts)
        return ndimage.map_coordinates(self.mass, idx.T, order=1, mode="constant", cval=0.0)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"grid": self.grid.to_dict(), "total": self.total, "mass": self.mass.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GridDensity":
        """Create instance from dictionary."""
        return cls(Grid2D.from_dict(data["grid"]), np.asarray(data["mass"], dtype=float))


def hessian_stencil(u: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Centered (u_xx, u_yy, u_xy) at nodes 1..n-1 along each axis."""
    c = u[1:-1, 1:-1]
    uxx = (u[2:, 1:-1] - 2 * c + u[:-2, 1:-1]) / h**2
    uyy = (u[1:-1, 2:] - 2 * c + u[1:-1, :-2]) / h**2
    uxy = (u[2:, 2:] - u[2:, :-2] - u[:-2, 2:] + u[:-2, :-2]) / (4 * h**2)
    return uxx, uyy, uxy


def _pad(inner: np.ndarray) -> np.ndarray:
    out = np.full((inner.shape[0] + 2, inner.shape[1] + 2), np.nan)
    out[1:-1, 1:-1] = inner
    return out


@dataclass(frozen=True, eq=False)
class ConvexPotentialGrid:
    """Nodal potential u with its Dirichlet data."""

    grid: Grid2D
    u: np.ndarray
    boundary: PlaneFn | None = field(default=None, compare=False)
    iterations: int = 0
    residual: float = float("nan")

    def __post_init__(self) -> None:
        arr = _check_field(self.grid, self.u, "Potential").copy()
        arr.setflags(write=False)
        object.__setattr__(self, "u", arr)

    def hessian(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Discrete (u_xx, u_yy, u_xy) on the node array; NaN off the interior."""
        parts = [_pad(p) for p in hessian_stencil(self.u, self.grid.h)]
        mask = ~self.grid.interior()
        for p in parts:
            p[mask] = np.nan
        return parts[0], parts[1], parts[2]

    def gradient(self) -> tuple[np.ndarray, np.ndarray]:
        """Centered first differences (one-sided on the rectangle edges)."""
        gx, gy = np.gradient(self.u, self.grid.h, edge_order=2)
        return gx, gy

    def min_hessian_eigenvalue(self) -> float:
        """Smallest eigenvalue of the discrete Hessian over interior nodes."""
        uxx, uyy, uxy = self.hessian()
        half_trace = 0.5 * (uxx + uyy)
        radius = np.sqrt(0.25 * (uxx - uyy) ** 2 + uxy**2)
        return float(np.nanmin(half_trace - radius))

    def is_convex(self, slack: float = CONVEXITY_SLACK) -> bool:
        """Discrete convexity up to a nonpositive slack."""
        return self.min_hessian_eigenvalue() >= slack

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "grid": self.grid.to_dict(),
            "iterations": self.iterations,
            "residual": self.residual,
            "u": self.u.tolist(),
        }

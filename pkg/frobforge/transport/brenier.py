"""Discrete Brenier transport between densities, pushforwards and displacement interpolation."""

import logging
import warnings
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import ot
import statsmodels.api as sm
from scipy.linalg import sqrtm

from frobforge.transport.models.grid import ConvexPotentialGrid, Grid2D, GridDensity, PlaneFn
from frobforge.transport.models.plan import EmpiricalMeasure, TransportPlan
from frobforge.utils.constants import (
    LP_MAX_SUPPORT,
    MARGINAL_TOL_SINKHORN,
    MASS_TOL,
    SINKHORN_EPSILON,
    SINKHORN_MAX_ITER,
    SINKHORN_STOP,
)
from frobforge.utils.errors import (
    MassMismatch,
    NonConvergence,
    ParamOutOfRange,
    ShapeMismatch,
    UndefinedOnSupport,
)

logger = logging.getLogger(__name__)

Method = Literal["exact-lp", "sinkhorn"]
PointMap = Callable[[np.ndarray], np.ndarray]
Measure = GridDensity | EmpiricalMeasure

SNAP_TOL = 1e-9
EPSILON_DECAY = 10.0
WARMUP_ITER = 5000
LP_MAX_ITER = 10_000_000


@dataclass(frozen=True, eq=False)
class BrenierResult:
    """Optimal coupling with the convex potential U recovered from its duals.

    ``potential[i]`` is U at the i-th source atom and ``dual_target[j]`` the
    conjugate potential at the j-th target atom.
    """

    plan: TransportPlan
    potential: np.ndarray
    dual_target: np.ndarray
    method: str
    epsilon: float | None = None

    @property
    def cost(self) -> float:
        """Total squared-distance cost."""
        return self.plan.cost

    @property
    def map(self) -> np.ndarray:
        """Barycentric image of each source atom."""
        return self.plan.barycentric_map()

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "method": self.method,
            "epsilon": self.epsilon,
            "cost": self.cost,
            "marginal_error": self.plan.marginal_error(),
            "potential": self.potential.tolist(),
        }


def _as_measure(m: Measure) -> EmpiricalMeasure:
    return EmpiricalMeasure.from_density(m) if isinstance(m, GridDensity) else m


def _sinkhorn(
    a: np.ndarray, b: np.ndarray, M: np.ndarray, epsilon: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Log-domain Sinkhorn with warm-started decreasing regularization.

    Returns the coupling and the dual potentials (f, g) for the cost ``M``.
    """
    reg = max(float(M.max()), epsilon)
    f = np.zeros(a.size)
    g = np.zeros(b.size)
    while True:
        final = reg <= epsilon
        reg = max(reg, epsilon)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pi, log = ot.bregman.sinkhorn_log(
                a,
                b,
                M,
                reg,
                numItermax=SINKHORN_MAX_ITER if final else WARMUP_ITER,
                stopThr=SINKHORN_STOP,
                log=True,
                warmstart=(f / reg, g / reg),
            )
        f, g = reg * log["log_u"], reg * log["log_v"]
        logger.debug(f"Sinkhorn stage reg = {reg:.1e}: {log['niter']} iterations")
        if final:
            return pi, f, g
        reg /= EPSILON_DECAY


def brenier_discrete(
    mu: Measure,
    nu: Measure,
    method: Method = "exact-lp",
    epsilon: float = SINKHORN_EPSILON,
) -> BrenierResult:
    """Optimal coupling for the squared-distance cost and U(x) = |x|²/2 - φ(x)."""
    source, target = _as_measure(mu), _as_measure(nu)
    if source.dim != target.dim:
        raise ShapeMismatch(f"Source is {source.dim}-D but target is {target.dim}-D")
    gap = abs(source.total - target.total)
    if gap > MASS_TOL:
        raise MassMismatch(f"Totals differ by {gap:.3e} ({source.total} vs {target.total})")
    a = source.masses
    scale = a.sum() / target.masses.sum()
    logger.debug(f"Rescaling target masses by {scale:.12g} (drift {gap:.3e})")
    b = target.masses * scale
    target = EmpiricalMeasure(target.points, b, target.density, target.nodes)
    M = ot.dist(source.points, target.points)

    if method == "exact-lp":
        if max(a.size, b.size) > LP_MAX_SUPPORT:
            raise ParamOutOfRange(
                f"LP supports {a.size} x {b.size} exceed {LP_MAX_SUPPORT}; use sinkhorn"
            )
        pi, log = ot.emd(a, b, M, numItermax=LP_MAX_ITER, log=True)
        if log.get("warning"):
            raise NonConvergence(f"Network simplex: {log['warning']}")
        f, g = np.asarray(log["u"]), np.asarray(log["v"])
        eps = None
    elif method == "sinkhorn":
        if not epsilon > 0:
            raise ParamOutOfRange(f"epsilon must be positive, got {epsilon}")
        pi, f, g = _sinkhorn(a, b, M, epsilon)
        eps = epsilon
    else:
        raise ParamOutOfRange(f"Unknown transport method {method!r}")

    plan = TransportPlan(source, target, pi, float(np.sum(pi * M)))
    error = plan.marginal_error()
    if method == "sinkhorn" and error > MARGINAL_TOL_SINKHORN:
        raise NonConvergence(f"Sinkhorn marginal error {error:.3e} at epsilon {epsilon}")
    # The duals are for |x - y|²; U is for the half-squared cost.
    U = 0.5 * np.sum(source.points**2, axis=1) - 0.5 * f
    V = 0.5 * np.sum(target.points**2, axis=1) - 0.5 * g
    logger.info(
        f"{method}: {a.size} x {b.size} atoms, cost {plan.cost:.6e}, marginal error {error:.1e}"
    )
    return BrenierResult(plan, U, V, method, eps)


def _splat(grid: Grid2D, pts: np.ndarray, masses: np.ndarray) -> GridDensity:
    """Deposit point masses on the four surrounding nodes (cloud in cell)."""
    s = grid.fractional_index(pts)
    nearest = np.round(s)
    s = np.where(np.abs(s - nearest) < SNAP_TOL, nearest, s)
    upper = np.array([grid.nx, grid.ny], dtype=float)
    clamped = np.clip(s, 0.0, upper)
    outside = np.any(clamped != s, axis=1) & (masses > 0)
    if np.any(outside):
        lost = float(masses[outside].sum())
        logger.warning(f"{int(outside.sum())} targets clamped to the grid edge (mass {lost:.3e})")
    base = np.minimum(np.floor(clamped), upper - 1).astype(np.int64)
    w = clamped - base
    out = np.zeros(grid.shape)
    for di, dj in ((0, 0), (1, 0), (0, 1), (1, 1)):
        wx = w[:, 0] if di else 1 - w[:, 0]
        wy = w[:, 1] if dj else 1 - w[:, 1]
        np.add.at(out, (base[:, 0] + di, base[:, 1] + dj), masses * wx * wy)
    return GridDensity(grid, out / grid.cell_measure)


def _push_points(grid: Grid2D, masses: np.ndarray, images: np.ndarray) -> GridDensity:
    live = masses > 0
    if np.any(~np.isfinite(images[live])):
        bad = int(np.sum(~np.all(np.isfinite(images[live]), axis=1)))
        raise UndefinedOnSupport(f"Map undefined on {bad} atoms of positive mass")
    return _splat(grid, images[live], masses[live])


def pushforward(T: PointMap | TransportPlan | BrenierResult, mu: Measure) -> Measure:
    """Image measure T#μ.

    A point map is applied to the atoms of μ and deposited back onto μ's
    grid. For a coupling the result is its column marginal.
    """
    if isinstance(T, BrenierResult):
        T = T.plan
    if isinstance(T, TransportPlan):
        marginal = T.column_marginal()
        if T.target.density is not None:
            return T.target.to_grid(marginal)
        return EmpiricalMeasure(T.target.points, marginal)
    if isinstance(mu, EmpiricalMeasure):
        return EmpiricalMeasure(np.asarray(T(mu.points), dtype=float), mu.masses)
    images = np.asarray(T(mu.grid.points), dtype=float)
    return _push_points(mu.grid, mu.node_masses().ravel(), images)


def _gradient_images(
    U: ConvexPotentialGrid | BrenierResult | PointMap, mu: GridDensity
) -> np.ndarray:
    """∇U at every node of μ's grid (NaN where it is not defined)."""
    grid = mu.grid
    if isinstance(U, ConvexPotentialGrid):
        if U.grid.shape != grid.shape or U.grid.bounds != grid.bounds:
            raise ShapeMismatch("Potential and density live on different grids")
        gx, gy = U.gradient()
        return np.column_stack([gx.ravel(), gy.ravel()])
    if isinstance(U, BrenierResult):
        source = U.plan.source
        if source.density is None or source.density.grid.shape != grid.shape:
            raise ShapeMismatch("Transport result was not computed from this grid")
        images = np.full((grid.points.shape[0], 2), np.nan)
        images[source.nodes] = U.map
        return images
    return np.asarray(U(grid.points), dtype=float)


def displacement_interpolate(
    mu: GridDensity, U: ConvexPotentialGrid | BrenierResult | PointMap, t: float
) -> GridDensity:
    """μ_t = ((1 - t) id + t ∇U)#μ; a callable ``U`` is taken to be the map ∇U."""
    if not 0.0 <= t <= 1.0:
        raise ParamOutOfRange(f"Interpolation time must lie in [0, 1], got {t}")
    x = mu.grid.points
    images = (1 - t) * x + t * _gradient_images(U, mu)
    return _push_points(mu.grid, mu.node_masses().ravel(), images)


def plan_interpolate(plan: TransportPlan, t: float) -> EmpiricalMeasure:
    """McCann interpolant of a discrete coupling: atoms (1 - t) x_i + t y_j of mass π_ij."""
    if not 0.0 <= t <= 1.0:
        raise ParamOutOfRange(f"Interpolation time must lie in [0, 1], got {t}")
    i, j = np.nonzero(plan.pi > 0)
    points = (1 - t) * plan.source.points[i] + t * plan.target.points[j]
    return EmpiricalMeasure(points, plan.pi[i, j])


def ma_transport_residual(
    U: ConvexPotentialGrid | np.ndarray, f: GridDensity, g: GridDensity | PlaneFn
) -> float:
    """Median over interior nodes of |det D²U · g(∇U) - f| / max f."""
    if not isinstance(U, ConvexPotentialGrid):
        U = ConvexPotentialGrid(f.grid, U)
    if U.grid.shape != f.grid.shape:
        raise ShapeMismatch("Potential and density live on different grids")
    uxx, uyy, uxy = U.hessian()
    gx, gy = U.gradient()
    mask = U.grid.interior()
    det = (uxx * uyy - uxy**2)[mask]
    if isinstance(g, GridDensity):
        g_at = g.at(np.column_stack([gx[mask], gy[mask]]))
    else:
        g_at = np.asarray(g(gx[mask], gy[mask]), dtype=float) * np.ones(det.shape)
    fv = f.mass[mask]
    return float(np.median(np.abs(det * g_at - fv)) / fv.max())


def gaussian_linear_map(cov_source: np.ndarray, cov_target: np.ndarray) -> np.ndarray:
    """Symmetric positive A with A Σ₀ A = Σ₁, the Brenier map between centered Gaussians."""
    S0, S1 = np.asarray(cov_source, dtype=float), np.asarray(cov_target, dtype=float)
    r = np.real(sqrtm(S0))
    r_inv = np.linalg.inv(r)
    return r_inv @ np.real(sqrtm(r @ S1 @ r)) @ r_inv


def linear_map_fit(result: BrenierResult) -> tuple[np.ndarray, np.ndarray]:
    """Mass-weighted least-squares affine fit T(x) ≈ A x + c of the barycentric map."""
    x = result.plan.source.points
    w = result.plan.source.masses
    design = sm.add_constant(x, has_constant="add")
    coefs = [sm.WLS(result.map[:, k], design, weights=w).fit().params for k in range(x.shape[1])]
    c = np.array([p[0] for p in coefs])
    A = np.array([p[1:] for p in coefs])
    return A, c


def _weighted_rms(diff: np.ndarray, reference: np.ndarray, w: np.ndarray) -> float:
    num = np.sum(w * np.sum(diff**2, axis=1))
    return float(np.sqrt(num / np.sum(w * np.sum(reference**2, axis=1))))


def map_rms_error(result: BrenierResult, exact: PointMap) -> float:
    """Relative mass-weighted RMS distance between the barycentric map and ``exact``."""
    x = result.plan.source.points
    w = result.plan.source.masses / result.plan.source.total
    target = np.asarray(exact(x), dtype=float)
    diff = result.map - target
    return _weighted_rms(diff, target, w)


def is_monotone_1d(result: BrenierResult) -> bool:
    """A one-dimensional transport map must be nondecreasing along the support."""
    if result.plan.source.dim != 1:
        raise ShapeMismatch("Monotonicity is checked on one-dimensional supports only")
    order = np.argsort(result.plan.source.points[:, 0], kind="stable")
    images = result.map[order, 0]
    return bool(np.all(np.diff(images) >= -MASS_TOL))


def legendre_dual(U: ConvexPotentialGrid, chunk: int = 256) -> np.ndarray:
    """Discrete conjugate V(y) = max_x (x·y - U(x)) over the same nodes."""
    pts = U.grid.points
    values = U.u.ravel()
    finite = np.isfinite(values)
    xs, us = pts[finite], values[finite]
    out = np.empty(pts.shape[0])
    for start in range(0, pts.shape[0], chunk):
        y = pts[start : start + chunk]
        out[start : start + chunk] = np.max(y @ xs.T - us[None, :], axis=1)
    return out.reshape(U.grid.shape)

"""Damped Newton solver for the Dirichlet problem det D²u = f on a 2-D grid."""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import statsmodels.api as sm
from scipy import sparse
from scipy.sparse.linalg import spsolve

from frobforge.transport.models.grid import (
    ConvexPotentialGrid,
    Grid2D,
    GridDensity,
    PlaneFn,
    hessian_stencil,
)
from frobforge.utils.constants import MA_MAX_ITER, MA_RELATIVE_RESIDUAL, MA_TOL
from frobforge.utils.errors import NonConvergence, NonPositiveRHS, ShapeMismatch

logger = logging.getLogger(__name__)

RHS = GridDensity | np.ndarray | PlaneFn
Stencil = dict[tuple[int, int], np.ndarray | float]

# Eigenvalues of the linearization Hessian are floored at this multiple of sqrt(f).
EIGEN_FLOOR = 1e-2
MIN_STEP = 2.0**-12
ARMIJO = 1e-4


def _rhs_values(f: RHS, grid: Grid2D) -> np.ndarray:
    if isinstance(f, GridDensity):
        if f.grid.shape != grid.shape or f.grid.h != grid.h:
            raise ShapeMismatch("Right-hand side lives on a different grid")
        return np.asarray(f.mass, dtype=float)
    if callable(f):
        return grid.evaluate(f)
    arr = np.asarray(f, dtype=float)
    if arr.shape != grid.shape:
        raise ShapeMismatch(f"Right-hand side has shape {arr.shape}, grid expects {grid.shape}")
    return arr


def _assemble(grid: Grid2D, stencil: Stencil) -> sparse.csr_matrix:
    """Sparse operator on interior unknowns; neighbours off the interior are dropped."""
    mask = grid.interior()
    index = np.full(grid.shape, -1, dtype=np.int64)
    index[mask] = np.arange(int(mask.sum()))
    I, J = np.nonzero(mask)
    rows, cols, vals = [], [], []
    for (di, dj), coef in stencil.items():
        c = np.broadcast_to(np.asarray(coef, dtype=float), grid.shape)[I, J]
        col = index[I + di, J + dj]
        keep = col >= 0
        rows.append(index[I, J][keep])
        cols.append(col[keep])
        vals.append(c[keep])
    n = int(mask.sum())
    return sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()


def _apply(u: np.ndarray, stencil: Stencil) -> np.ndarray:
    """Apply a 9-point stencil at nodes 1..n-1 along each axis."""
    out = np.zeros((u.shape[0] - 2, u.shape[1] - 2))
    nx, ny = u.shape
    for (di, dj), coef in stencil.items():
        c = np.broadcast_to(np.asarray(coef, dtype=float), u.shape)[1:-1, 1:-1]
        out += c * u[1 + di : nx - 1 + di, 1 + dj : ny - 1 + dj]
    return out


def _laplacian(h: float) -> Stencil:
    s = 1 / h**2
    return {(0, 0): -4 * s, (1, 0): s, (-1, 0): s, (0, 1): s, (0, -1): s}


def _poisson_start(grid: Grid2D, f: np.ndarray, ub: np.ndarray) -> np.ndarray:
    """Solve Δu = 2√f with the Dirichlet data, a convex first guess."""
    mask = grid.interior()
    stencil = _laplacian(grid.h)
    fixed = np.where(mask, 0.0, ub)
    inner = _apply(fixed, stencil)
    rhs = 2.0 * np.sqrt(f[mask]) - np.pad(inner, 1)[mask]
    u = ub.copy()
    u[mask] = spsolve(_assemble(grid, stencil).tocsc(), rhs)
    return u


def _operator(u: np.ndarray, f: np.ndarray, mask: np.ndarray, h: float) -> np.ndarray:
    """Residual u_xx u_yy - u_xy² - f at interior nodes (flat)."""
    uxx, uyy, uxy = (np.pad(p, 1) for p in hessian_stencil(u, h))
    return (uxx * uyy - uxy**2 - f)[mask]


def _projected_hessian(
    u: np.ndarray, f: np.ndarray, h: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Discrete Hessian with eigenvalues floored so the linearization stays elliptic."""
    uxx, uyy, uxy = (np.pad(p, 1) for p in hessian_stencil(u, h))
    H = np.stack([np.stack([uxx, uxy], -1), np.stack([uxy, uyy], -1)], -2)
    lam, vec = np.linalg.eigh(H)
    floor = EIGEN_FLOOR * np.sqrt(np.clip(f, 0.0, None))[..., None]
    lam = np.maximum(lam, floor)
    Hp = np.einsum("...ik,...k,...jk->...ij", vec, lam, vec)
    return Hp[..., 0, 0], Hp[..., 1, 1], Hp[..., 0, 1]


def _newton_stencil(a: np.ndarray, b: np.ndarray, c: np.ndarray, h: float) -> Stencil:
    """Linearization b δu_xx + a δu_yy - 2c δu_xy of the determinant."""
    h2 = h**2
    return {
        (0, 0): -2 * (a + b) / h2,
        (1, 0): b / h2,
        (-1, 0): b / h2,
        (0, 1): a / h2,
        (0, -1): a / h2,
        (1, 1): -c / (2 * h2),
        (-1, -1): -c / (2 * h2),
        (1, -1): c / (2 * h2),
        (-1, 1): c / (2 * h2),
    }


def ma_solve(
    f: RHS,
    boundary: PlaneFn,
    grid: Grid2D | None = None,
    *,
    tol: float = MA_TOL,
    max_iter: int = MA_MAX_ITER,
) -> ConvexPotentialGrid:
    """Solve u_xx u_yy - u_xy² = f with u = boundary off the interior.

    Newton steps use the cofactor of the discrete Hessian projected onto the
    positive cone, with backtracking on the max-norm residual. Iteration stops
    when the residual is below ``tol * max f``.
    """
    if grid is None:
        if not isinstance(f, GridDensity):
            raise ShapeMismatch("A grid is required unless f is a GridDensity")
        grid = f.grid
    mask = grid.interior()
    fv = _rhs_values(f, grid)
    if np.any(~(fv[mask] > 0)):
        bad = int(np.sum(~(fv[mask] > 0)))
        raise NonPositiveRHS(f"Right-hand side is not positive on {bad} interior nodes")
    f_max = float(fv[mask].max())
    target = tol * f_max

    ub = grid.evaluate(boundary)
    u = _poisson_start(grid, fv, ub)
    F = _operator(u, fv, mask, grid.h)
    norm = float(np.max(np.abs(F)))
    logger.debug(f"Monge-Ampere start: |F| = {norm:.3e} on {int(mask.sum())} unknowns")

    iteration = 0
    while norm > target:
        if iteration >= max_iter:
            raise NonConvergence(f"Newton stopped at |F| = {norm:.3e} after {iteration} steps")
        iteration += 1
        a, b, c = _projected_hessian(u, fv, grid.h)
        J = _assemble(grid, _newton_stencil(a, b, c, grid.h)).tocsc()
        step = spsolve(J, -F)
        alpha = 1.0
        while alpha >= MIN_STEP:
            trial = u.copy()
            trial[mask] += alpha * step
            F_trial = _operator(trial, fv, mask, grid.h)
            trial_norm = float(np.max(np.abs(F_trial)))
            if trial_norm <= (1 - ARMIJO * alpha) * norm:
                break
            alpha /= 2
        else:
            if norm <= MA_RELATIVE_RESIDUAL * f_max:
                logger.debug(f"Newton stagnated at |F| = {norm:.3e}, accepted")
                break
            raise NonConvergence(f"Line search failed at |F| = {norm:.3e} (step {iteration})")
        u, F, norm = trial, F_trial, trial_norm
        logger.debug(f"Newton step {iteration}: alpha = {alpha:g}, |F| = {norm:.3e}")

    solution = ConvexPotentialGrid(grid, u, boundary, iteration, norm / f_max)
    if not solution.is_convex():
        logger.warning(
            f"Discrete Hessian has eigenvalue {solution.min_hessian_eigenvalue():.3e} < 0"
        )
    logger.info(f"Monge-Ampere solved on {grid.nx}x{grid.ny} in {iteration} Newton steps")
    return solution


def ma_residual(u: ConvexPotentialGrid, f: RHS) -> np.ndarray:
    """Pointwise det D²u - f with centered stencils; NaN off the interior."""
    fv = _rhs_values(f, u.grid)
    uxx, uyy, uxy = u.hessian()
    return uxx * uyy - uxy**2 - fv


def ma_residual_norm(u: ConvexPotentialGrid, f: RHS) -> float:
    """Max-norm of ``ma_residual`` over the interior."""
    return float(np.nanmax(np.abs(ma_residual(u, f))))


def exponential_solution() -> tuple[PlaneFn, PlaneFn]:
    """Exact u = exp(|x|²/2) and its right-hand side (1 + |x|²) exp(|x|²)."""

    def u(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return np.exp(0.5 * (X**2 + Y**2))

    def f(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        r2 = X**2 + Y**2
        return (1 + r2) * np.exp(r2)

    return u, f


def quadratic_solution() -> tuple[PlaneFn, PlaneFn]:
    """Exact u = |x|²/2 with f ≡ 1."""
    return (lambda X, Y: 0.5 * (X**2 + Y**2)), (lambda X, Y: np.ones_like(X))


def max_error(solution: ConvexPotentialGrid, exact: Callable[..., np.ndarray]) -> float:
    """L∞ error against an exact solution over the interior."""
    diff = solution.u - solution.grid.evaluate(exact)
    return float(np.max(np.abs(diff[solution.grid.interior()])))


@dataclass(frozen=True)
class ConvergenceFit:
    """Observed order from a log-log fit of errors against step sizes."""

    order: float
    stderr: float
    ratios: tuple[float, ...]


def convergence_order(errors: Sequence[float], steps: Sequence[float]) -> ConvergenceFit:
    """OLS slope of log(error) on log(h); ``ratios`` are successive error quotients."""
    e, h = np.asarray(errors, dtype=float), np.asarray(steps, dtype=float)
    if e.size != h.size or e.size < 2:
        raise ShapeMismatch("Need at least two matching errors and step sizes")
    fit = sm.OLS(np.log(e), sm.add_constant(np.log(h))).fit()
    stderr = float(fit.bse[1]) if e.size > 2 else float("nan")
    return ConvergenceFit(float(fit.params[1]), stderr, tuple(e[:-1] / e[1:]))

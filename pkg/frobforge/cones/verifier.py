"""Flatness, total geodesy and Gauss-equation certificates for loci of the cones."""

import logging
import time
from collections.abc import Callable

import numpy as np

from frobforge.cones.geometry import geodesic, log_det_derivative
from frobforge.cones.models.cone_point import ConePoint, GroundField, TangentVector
from frobforge.hessian.models.fields import central_difference
from frobforge.hessian.models.tensors import SymTensor2, SymTensor3
from frobforge.hessian.pipeline import curvature_from_A, levi_civita_curvature, wdvv_residual
from frobforge.utils.constants import (
    DEFAULT_SEED,
    FD_STEP,
    FLAT_LOCUS_SAMPLES,
    FLAT_TOL,
    GAUSS_TOL,
    GEODESY_TOL,
)
from frobforge.utils.errors import ParamOutOfRange, ShapeMismatch
from frobforge.utils.reporting import CheckResult, Report
from frobforge.utils.sampling import rng

logger = logging.getLogger(__name__)

LOCUS_SPREAD = 0.1


def _random_diagonal(n: int, field: GroundField, gen: np.random.Generator) -> ConePoint:
    coords = np.zeros(field.chart_dim(n))
    coords[:n] = gen.uniform(0.5, 2.0, n)
    return ConePoint.from_coords(field, n, coords)


def diagonal_basis(n: int, field: GroundField) -> np.ndarray:
    """Chart vectors spanning the real diagonal, as columns."""
    return np.eye(field.chart_dim(n))[:, :n]


def flat_locus_verify(
    n: int,
    field: GroundField,
    samples: int = FLAT_LOCUS_SAMPLES,
    seed: int = DEFAULT_SEED,
    tol: float = FLAT_TOL,
    geodesy_tol: float = GEODESY_TOL,
) -> Report:
    """Check curvature, WDVV and geodesic closure on the real-diagonal torus of P_n(field)."""
    if n < 2:
        raise ParamOutOfRange(f"Flat locus needs n >= 2, got {n}")
    start = time.perf_counter()
    report = Report(f"flat_locus[{field.value}{n}]")
    P = diagonal_basis(n, field)
    curvature = wdvv = geodesy = 0.0
    for k in range(samples):
        gen = rng(seed, n, k)
        X = _random_diagonal(n, field, gen)
        g = SymTensor2(P.T @ log_det_derivative(X, 2) @ P)
        A = SymTensor3(log_det_derivative(X, 3)).restrict(P)
        curvature = max(curvature, curvature_from_A(g, A).norm())
        wdvv = max(wdvv, wdvv_residual(g, A).norm())

        U = TangentVector.from_coords(field, n, P @ gen.uniform(-1.0, 1.0, n))
        Y = geodesic(X, U, float(gen.uniform(-1.0, 1.0)))
        scale = max(1.0, float(np.max(np.abs(Y.coords[:n]))))
        off = float(np.max(np.abs(Y.coords[n:]), initial=0.0))
        geodesy = max(geodesy, off / scale)

    report.add(CheckResult("diagonal_curvature", curvature, tol, samples, seed))
    report.add(CheckResult("diagonal_wdvv", wdvv, tol, samples, seed))
    report.add(CheckResult("diagonal_geodesy", geodesy, geodesy_tol, samples, seed))
    report.wall_time = time.perf_counter() - start
    return report


def full_chart_wdvv(X: ConePoint) -> float:
    """WDVV residual norm of the full chart at X; nonzero off the flat locus."""
    g = SymTensor2(log_det_derivative(X, 2))
    return wdvv_residual(g, SymTensor3(log_det_derivative(X, 3))).norm()


def _chart_metric(n: int, field: GroundField) -> Callable[[np.ndarray], np.ndarray]:
    return lambda y: log_det_derivative(ConePoint.from_coords(field, n, y), 2)


def second_fundamental_form(X: ConePoint, P: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """``alpha[a, b]``: normal part of ∇_{P_a} P_b, from differentiated metric entries.

    The Christoffel symbols come from central differences of the analytic
    metric, independently of the amplitude.
    """
    g = log_det_derivative(X, 2)
    dg = central_difference(_chart_metric(X.n, X.field), X.coords, h)  # [k, i, j] = ∂_k g_ij
    lowered = 0.5 * (np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg)
    gamma = np.linalg.solve(g, lowered.reshape(g.shape[0], -1)).reshape(lowered.shape)
    nabla = np.einsum("lij,ia,jb->abl", gamma, P, P)
    projector = P @ np.linalg.solve(P.T @ g @ P, P.T @ g)
    return nabla - np.einsum("lm,abm->abl", projector, nabla)


def gauss_sides(
    X: ConePoint, P: np.ndarray, vectors: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
) -> tuple[float, float]:
    """Ambient Rm(X, Y, Z, W) and Rm_sub + g(α(X,Z), α(Y,W)) - g(α(Y,Z), α(X,W))."""
    a, b, c, d = vectors
    g = SymTensor2(log_det_derivative(X, 2))
    A = SymTensor3(log_det_derivative(X, 3))
    ambient = levi_civita_curvature(g, A)
    sub = levi_civita_curvature(SymTensor2(P.T @ g.entries @ P), A.restrict(P))
    alpha = second_fundamental_form(X, P)

    def form(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("abl,a,b->l", alpha, u, v)

    lhs = ambient(P @ a, P @ b, P @ c, P @ d)
    rhs = sub(a, b, c, d) + g.inner(form(a, c), form(b, d)) - g.inner(form(b, c), form(a, d))
    return lhs, rhs


def gauss_equation_check(
    n: int,
    field: GroundField,
    locus: str | np.ndarray = "diagonal",
    base: ConePoint | None = None,
    samples: int = 5,
    seed: int = DEFAULT_SEED,
    tol: float = GAUSS_TOL,
) -> Report:
    """Gauss equation on a flat locus, or on base + span(locus columns) for a chart basis."""
    start = time.perf_counter()
    if isinstance(locus, str):
        if locus != "diagonal":
            raise ParamOutOfRange(f"Unknown locus {locus!r}")
        P = diagonal_basis(n, field)
    else:
        P = np.asarray(locus, dtype=float)
        if P.ndim != 2 or P.shape[0] != field.chart_dim(n):
            raise ShapeMismatch(f"Locus basis must have {field.chart_dim(n)} rows, got {P.shape}")
    report = Report(f"gauss[{field.value}{n}]")
    worst = 0.0
    tuples = 4
    for k in range(samples):
        gen = rng(seed, n, k)
        if base is None and isinstance(locus, str):
            X = _random_diagonal(n, field, gen)
        else:
            origin = ConePoint.identity(field, n) if base is None else base
            shift = P @ gen.uniform(-LOCUS_SPREAD, LOCUS_SPREAD, P.shape[1])
            X = ConePoint.from_coords(field, n, origin.coords + shift)
        for _ in range(tuples):
            vectors = tuple(gen.normal(size=P.shape[1]) for _ in range(4))
            lhs, rhs = gauss_sides(X, P, vectors)  # type: ignore[arg-type]
            worst = max(worst, abs(lhs - rhs))
    report.add(CheckResult("gauss_equation", worst, tol, samples * tuples, seed))
    report.wall_time = time.perf_counter() - start
    return report

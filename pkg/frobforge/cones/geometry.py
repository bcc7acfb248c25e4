"""Log-det potential of the matrix cones and its metric, amplitude, geodesics and curvature."""

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from frobforge.cones.models.cone_point import (
    ConePoint,
    GroundField,
    TangentVector,
    chart_basis,
    matrix_from_coords,
)
from frobforge.hessian.models.fields import PotentialField
from frobforge.hessian.models.tensors import SymTensor2, SymTensor3, Tensor4
from frobforge.hessian.pipeline import levi_civita_curvature
from frobforge.utils.constants import CONE_EIGENVALUE_RATIO, DEGENERATE_PLANE
from frobforge.utils.errors import DegeneratePlane, NotInCone, ShapeMismatch

logger = logging.getLogger(__name__)


def cone_potential(X: ConePoint) -> float:
    """Φ(X) = -log det(realification X) / κ."""
    sign, logdet = np.linalg.slogdet(X.matrix)
    if abs(sign - 1) > 1e-9:
        raise NotInCone(f"log det needs a positive determinant, got sign {sign}")
    return float(-X.field.trace_scale * logdet)


def _chart_products(X: ConePoint) -> np.ndarray:
    """``Y[a] = X⁻¹ B_a`` for the chart basis B."""
    return np.einsum("ij,ajk->aik", X.inverse, chart_basis(X.n, X.field), optimize=True)


def log_det_derivative(X: ConePoint, order: int) -> np.ndarray:
    """Chart derivative tensor of Φ of order 1 to 4.

    D^k Φ[U_1..U_k] = c (-1)^k Σ_σ Re tr(Y_σ1 ... Y_σ(k-1) Y_k), the sum
    running over permutations of the first k - 1 slots, Y_a = X⁻¹ U_a.
    """
    Y = _chart_products(X)
    c = X.field.trace_scale
    if order == 1:
        return -c * np.einsum("aii->a", Y).real
    if order == 2:
        return c * np.einsum("aij,bji->ab", Y, Y, optimize=True).real
    if order == 3:
        P = np.einsum("aij,bjk,cki->abc", Y, Y, Y, optimize=True).real
        return -c * (P + P.transpose(1, 0, 2))
    if order == 4:
        P = np.einsum("aij,bjk,ckl,dli->abcd", Y, Y, Y, Y, optimize=True).real
        total = sum(P.transpose((*perm, 3)) for perm in itertools.permutations(range(3)))
        return c * np.asarray(total)
    raise ValueError(f"Unsupported derivative order {order}")


def cone_metric(X: ConePoint) -> SymTensor2:
    """g(U, V) = Re tr(X⁻¹ U X⁻¹ V) pulled back to chart coordinates."""
    return SymTensor2(log_det_derivative(X, 2))


def cone_amplitude(X: ConePoint) -> SymTensor3:
    """A(U, V, W) = -(tr(X⁻¹WX⁻¹UX⁻¹V) + tr(X⁻¹UX⁻¹WX⁻¹V)) in the chart."""
    return SymTensor3(log_det_derivative(X, 3))


def cone_fourth(X: ConePoint) -> np.ndarray:
    """Fourth chart derivative of Φ."""
    return log_det_derivative(X, 4)


def in_cone(coords: np.ndarray, n: int, field: GroundField) -> bool:
    """Membership test on chart coordinates."""
    eig = np.linalg.eigvalsh(matrix_from_coords(coords, n, field))
    return bool(eig[0] > 0 and eig[0] > CONE_EIGENVALUE_RATIO * eig[-1])


def cone_potential_field(n: int, field: GroundField) -> PotentialField:
    """The log-det potential of P_n(field) as a chart potential, analytic to order 4."""

    def point(x: np.ndarray) -> ConePoint:
        return ConePoint.from_coords(field, n, x)

    return PotentialField(
        dim=field.chart_dim(n),
        value=lambda x: cone_potential(point(x)),
        contains=lambda x: in_cone(x, n, field),
        jets={k: (lambda x, k=k: log_det_derivative(point(x), k)) for k in range(1, 5)},
        name=f"log_det[{field.value}{n}]",
    )


def _sqrt_and_inv_sqrt(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, V = np.linalg.eigh(M)
    root = np.sqrt(w)
    return (V * root) @ V.conj().T, (V / root) @ V.conj().T


def geodesic(X: ConePoint, U: TangentVector, t: float) -> ConePoint:
    """X^{1/2} exp(t X^{-1/2} U X^{-1/2}) X^{1/2}."""
    if (U.field, U.n) != (X.field, X.n):
        raise ShapeMismatch("Tangent vector and base point live on different cones")
    root, inv_root = _sqrt_and_inv_sqrt(X.matrix)
    inner = inv_root @ U.matrix @ inv_root
    w, V = np.linalg.eigh(0.5 * (inner + inner.conj().T))
    expo = (V * np.exp(t * w)) @ V.conj().T
    return ConePoint.from_matrix(X.field, X.n, root @ expo @ root)


def geodesic_rk4(X: ConePoint, U: TangentVector, t: float, steps: int = 400) -> np.ndarray:
    """Integrate X'' = X' X⁻¹ X' by RK4; returns the stored matrix at time t."""
    dt = t / steps
    pos = X.matrix.astype(complex)
    vel = U.matrix.astype(complex)

    def rhs(p: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return v, v @ np.linalg.solve(p, v)

    for _ in range(steps):
        k1p, k1v = rhs(pos, vel)
        k2p, k2v = rhs(pos + 0.5 * dt * k1p, vel + 0.5 * dt * k1v)
        k3p, k3v = rhs(pos + 0.5 * dt * k2p, vel + 0.5 * dt * k2v)
        k4p, k4v = rhs(pos + dt * k3p, vel + dt * k3v)
        pos = pos + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        vel = vel + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return pos


def cone_curvature(X: ConePoint) -> tuple[SymTensor2, Tensor4]:
    """Metric and Riemann tensor Rm(X, Y, Z, W) = g(R(X, Y)Z, W) at X."""
    g = cone_metric(X)
    return g, levi_civita_curvature(g, cone_amplitude(X))


def sectional_curvature(X: ConePoint, U: TangentVector, V: TangentVector) -> float:
    """K(U, V) = Rm(U, V, V, U) / (g(U, U) g(V, V) - g(U, V)²)."""
    g, Rm = cone_curvature(X)
    return plane_curvature(g, Rm, U.coords, V.coords)


def plane_curvature(g: SymTensor2, Rm: Tensor4, u: np.ndarray, v: np.ndarray) -> float:
    """Sectional curvature of span{u, v} from a metric and Riemann tensor already in hand."""
    guu, gvv, guv = g.inner(u, u), g.inner(v, v), g.inner(u, v)
    denom = guu * gvv - guv**2
    if denom < DEGENERATE_PLANE * max(1.0, guu * gvv):
        raise DegeneratePlane(f"Tangent vectors span a degenerate plane (area² {denom:.3e})")
    return Rm(u, v, v, u) / denom


def _bracket(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return P @ Q - Q @ P


@dataclass(frozen=True)
class BracketFit:
    """Least-squares c with R(U, V)W ≈ c (-[[U, V], W]) and the residual left."""

    scale: float
    residual: float


def curvature_bracket_check(
    U: TangentVector,
    V: TangentVector,
    W: TangentVector | Sequence[TangentVector],
    X: ConePoint | None = None,
) -> BracketFit:
    """Fit the metric curvature R(U, V)W to -[[U, V], W] at the base point (identity)."""
    X = ConePoint.identity(U.field, U.n) if X is None else X
    g, Rm = cone_curvature(X)
    targets = [W] if isinstance(W, TangentVector) else list(W)
    u, v = U.coords, V.coords
    lhs, rhs = [], []
    for w in targets:
        lowered = np.einsum("abcd,a,b,c->d", Rm.entries, u, v, w.coords)
        lhs.append(g.inverse @ lowered)
        bracket = -_bracket(_bracket(U.matrix, V.matrix), w.matrix)
        rhs.append(TangentVector.from_matrix(U.field, U.n, bracket).coords)
    r, s = np.array(lhs), np.array(rhs)
    denom = float(np.sum(s * s))
    scale = float(np.sum(r * s) / denom) if denom > 0 else 0.0
    residual = float(np.max(np.linalg.norm(r - scale * s, axis=1)))
    logger.debug(f"Bracket fit c={scale:.6f}, residual={residual:.3e}")
    return BracketFit(scale, residual)

"""Residuals that detect Codazzi, WDVV, Euler and identity-field structure."""

import logging
from collections.abc import Iterable

import numpy as np

from frobforge.hessian.models.fields import PotentialField, VectorField, central_difference
from frobforge.hessian.models.tensors import SymTensor2, SymTensor3
from frobforge.hessian.pipeline import eval_amplitude, eval_metric, structure_constants
from frobforge.utils.constants import AFFINE_TOL
from frobforge.utils.errors import ParamOutOfRange

logger = logging.getLogger(__name__)


def codazzi_residual(p: PotentialField, x: np.ndarray, order: int = 3) -> float:
    """Asymmetry of ∂_{i0} D^order Φ (i1..ik) under the swap i0 <-> i1."""
    if order not in (3, 4):
        raise ParamOutOfRange(f"Codazzi order must be 3 or 4, got {order}")
    T = p.derivative(x, order + 1)
    residual = float(np.max(np.abs(T - np.swapaxes(T, 0, 1))))
    logger.debug(f"{p.name}: order-{order} Codazzi residual {residual:.3e}")
    return residual


def codazzi_dual_residual(g: SymTensor2, A: SymTensor3) -> float:
    """max |Σ_f C^f_ab A_fcd - Σ_f C^f_bc A_fad| with ∂_f g_cd supplied as A_fcd."""
    C = structure_constants(g, A).entries
    X = np.einsum("abf,fcd->abcd", C, A.entries)
    Y = np.einsum("bcf,fad->abcd", C, A.entries)
    return float(np.max(np.abs(X - Y)))


def affine_field_check(
    E: VectorField, samples: Iterable[np.ndarray], tol: float = AFFINE_TOL
) -> bool:
    """True iff every second partial of every component vanishes at all samples."""
    for x in samples:
        worst = float(np.max(np.abs(E.hessian(x))))
        if worst > tol:
            logger.info(f"{E.name}: second partial {worst:.3e} at {np.asarray(x)}")
            return False
    return True


def _structure_field(p: PotentialField, y: np.ndarray) -> np.ndarray:
    g = SymTensor2(p.derivative(y, 2))
    return structure_constants(g, SymTensor3(p.derivative(y, 3))).entries


def _euler_defect_parts(
    E: VectorField, p: PotentialField, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return (defect at β = 0, C); both indexed [a, b, c] for the ∂_c component."""
    x = np.asarray(x, dtype=float)
    eval_metric(p, x)
    C = _structure_field(p, x)
    dC = central_difference(lambda y: _structure_field(p, y), x, p.h)  # [m, a, b, c]
    e = E(x)
    J = E.jacobian(x)  # [m, a] = ∂_a E^m
    # [E, ∂_a o ∂_b] - [E, ∂_a] o ∂_b - ∂_a o [E, ∂_b]
    defect = (
        np.einsum("m,mabc->abc", e, dC)
        - np.einsum("abm,cm->abc", C, J)
        + np.einsum("ma,mbc->abc", J, C)
        + np.einsum("mb,amc->abc", J, C)
    )
    return defect, C


def euler_conformal_residual(
    E: VectorField, p: PotentialField, beta: float, x: np.ndarray
) -> float:
    """Max over basis pairs (a, b) of |[E, a o b] - [E, a] o b - a o [E, b] - β a o b|."""
    defect, C = _euler_defect_parts(E, p, x)
    return float(np.max(np.linalg.norm(defect - beta * C, axis=-1)))


def fit_euler_beta(E: VectorField, p: PotentialField, x: np.ndarray) -> tuple[float, float]:
    """Least-squares β for the Euler relation and the residual it leaves."""
    defect, C = _euler_defect_parts(E, p, x)
    denom = float(np.sum(C * C))
    beta = float(np.sum(defect * C) / denom) if denom > 0 else 0.0
    return beta, float(np.max(np.linalg.norm(defect - beta * C, axis=-1)))


def identity_field_residual(p: PotentialField, e: VectorField, x: np.ndarray) -> float:
    """max |A(e, ∂_a, ∂_b) - g_ab|: zero iff e is the unit of the product at x."""
    g = eval_metric(p, x)
    A = eval_amplitude(p, x)
    contracted = np.einsum("k,kab->ab", e(x), A.entries)
    return float(np.max(np.abs(contracted - g.entries)))

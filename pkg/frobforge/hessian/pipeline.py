"""Pre-Frobenius tensor pipeline: metric, amplitude, product and curvature."""

import logging

import numpy as np

from frobforge.hessian.models.fields import PotentialField, central_difference
from frobforge.hessian.models.tensors import MixedTensor12, SymTensor2, SymTensor3, Tensor4
from frobforge.utils.constants import CURVATURE_SCALE
from frobforge.utils.errors import ShapeMismatch, SingularMetric

logger = logging.getLogger(__name__)

CURVATURE_INDEX_ORDER = "Rm[X][Y][Z][W] = g(R(X,Y)Z, W)"


def eval_metric(p: PotentialField, x: np.ndarray) -> SymTensor2:
    """Hessian metric g_ij = ∂_i∂_j Φ at x."""
    g = SymTensor2(p.derivative(x, 2))
    if g.is_singular:
        raise SingularMetric(f"{p.name}: Hessian is singular at {np.asarray(x)}")
    if not g.is_positive_definite:
        logger.warning(f"{p.name}: Hessian at {np.asarray(x)} is not positive definite")
    return g


def eval_amplitude(p: PotentialField, x: np.ndarray) -> SymTensor3:
    """Amplitude A_ijk = ∂_i∂_j∂_k Φ at x."""
    return SymTensor3(p.derivative(x, 3))


def _check_dims(g: SymTensor2, A: SymTensor3) -> None:
    if g.dim != A.dim:
        raise ShapeMismatch(f"Metric has dim {g.dim} but amplitude has dim {A.dim}")


def structure_constants(g: SymTensor2, A: SymTensor3) -> MixedTensor12:
    """C^c_ab = Σ_e A_abe g^ec (no factor 1/2)."""
    _check_dims(g, A)
    return MixedTensor12(np.einsum("abe,ec->abc", A.entries, g.inverse))


def christoffel(g: SymTensor2, A: SymTensor3) -> np.ndarray:
    """``G[i, j, k] = Γ^i_jk = 1/2 Σ_l A_jkl g^li``."""
    _check_dims(g, A)
    return 0.5 * np.einsum("il,jkl->ijk", g.inverse, A.entries)


def _quadratic_form(g: SymTensor2, A: SymTensor3) -> np.ndarray:
    """``Q[a, b, c, d] = Σ_ef A_abe g^ef A_fcd``."""
    _check_dims(g, A)
    return np.einsum("abe,ef,fcd->abcd", A.entries, g.inverse, A.entries, optimize=True)


def frobenius_pairing_residual(g: SymTensor2, A: SymTensor3) -> float:
    """Largest deviation of g(a o b, c) and g(a, b o c) from A_abc, relative to max(1, |A|)."""
    C = structure_constants(g, A).entries
    left = np.einsum("abd,dc->abc", C, g.entries)
    right = np.einsum("ad,bcd->abc", g.entries, C)
    scale = max(1.0, float(np.max(np.abs(A.entries))))
    return float(max(np.max(np.abs(left - A.entries)), np.max(np.abs(right - A.entries))) / scale)


def wdvv_residual(g: SymTensor2, A: SymTensor3) -> Tensor4:
    """W_abcd = Σ A_abe g^ef A_fcd - Σ A_bce g^ef A_fad."""
    Q = _quadratic_form(g, A)
    return Tensor4(Q - np.einsum("bcad->abcd", Q), "residual", "W[a][b][c][d]")


def curvature_from_A(g: SymTensor2, A: SymTensor3) -> Tensor4:
    """Contraction R_acdb = Σ g^ef (A_eab A_fcd - A_ead A_fcb), stored as T[a][c][d][b]."""
    Q = _quadratic_form(g, A)
    T = np.einsum("iljk->ijkl", Q) - np.einsum("ikjl->ijkl", Q)
    return Tensor4(T, "curvature", "T[a][c][d][b] = R_acdb")


def levi_civita_curvature(g: SymTensor2, A: SymTensor3) -> Tensor4:
    """Riemann tensor of the Hessian metric from the amplitude alone."""
    T = curvature_from_A(g, A)
    return Tensor4(CURVATURE_SCALE * T.entries, "curvature", CURVATURE_INDEX_ORDER)


def christoffel_field(p: PotentialField, x: np.ndarray) -> np.ndarray:
    """Γ^i_jk of p at x."""
    return christoffel(SymTensor2(p.derivative(x, 2)), SymTensor3(p.derivative(x, 3)))


def curvature_direct(p: PotentialField, x: np.ndarray) -> Tensor4:
    """Levi-Civita curvature from finite-differenced Christoffel symbols."""
    x = np.asarray(x, dtype=float)
    g = eval_metric(p, x)
    G = christoffel_field(p, x)
    dG = central_difference(lambda y: christoffel_field(p, y), x, p.h)
    # R^i_jkl with R(∂_k, ∂_l)∂_j = R^i_jkl ∂_i
    R = (
        np.einsum("kilj->ijkl", dG)
        - np.einsum("likj->ijkl", dG)
        + np.einsum("ikm,mlj->ijkl", G, G)
        - np.einsum("ilm,mkj->ijkl", G, G)
    )
    Rm = np.einsum("mi,ijkl->kljm", g.entries, R)
    return Tensor4(Rm, "curvature", CURVATURE_INDEX_ORDER)


def integrate_geodesic(
    p: PotentialField, x0: np.ndarray, v0: np.ndarray, t: float, steps: int = 200
) -> np.ndarray:
    """RK4 solution of x'' + Γ(x', x') = 0; returns the position at time t."""
    dt = t / steps
    state = np.concatenate([np.asarray(x0, dtype=float), np.asarray(v0, dtype=float)])
    n = p.dim

    def rhs(s: np.ndarray) -> np.ndarray:
        pos, vel = s[:n], s[n:]
        return np.concatenate([vel, -np.einsum("ijk,j,k->i", christoffel_field(p, pos), vel, vel)])

    for _ in range(steps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * dt * k1)
        k3 = rhs(state + 0.5 * dt * k2)
        k4 = rhs(state + dt * k3)
        state = state + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return state[:n]

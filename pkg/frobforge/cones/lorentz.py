"""Lorentz cone x0 > |x| with the potential -log(x0² - |x|²)."""

import logging

import numpy as np

from frobforge.cones.models.cone_point import LorentzPoint
from frobforge.hessian.models.fields import PotentialField
from frobforge.hessian.models.tensors import SymTensor2, SymTensor3

logger = logging.getLogger(__name__)


def _minkowski(dim: int) -> np.ndarray:
    J = -np.eye(dim)
    J[0, 0] = 1.0
    return J


def _jets(x: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """(q, gradient, Hessian, third derivative) with q = xᵀJx."""
    J = _minkowski(x.size)
    y = J @ x
    q = float(x @ y)
    grad = -2.0 * y / q
    hess = -2.0 * J / q + 4.0 * np.outer(y, y) / q**2
    sym = np.einsum("ij,k->ijk", J, y)
    sym = sym + np.einsum("ik,j->ijk", J, y) + np.einsum("jk,i->ijk", J, y)
    third = 4.0 * sym / q**2 - 16.0 * np.einsum("i,j,k->ijk", y, y, y) / q**3
    return q, grad, hess, third


def _inside(x: np.ndarray) -> bool:
    return bool(x[0] > 0 and x[0] ** 2 - float(x[1:] @ x[1:]) > 0)


def lorentz_potential(p: LorentzPoint) -> float:
    """Φ = -log(x0² - Σ x_i²)."""
    x = p.coords
    return float(-np.log(x[0] ** 2 - x[1:] @ x[1:]))


def lorentz_metric(p: LorentzPoint) -> SymTensor2:
    """Hessian of the Lorentz potential."""
    return SymTensor2(_jets(p.coords)[2])


def lorentz_amplitude(p: LorentzPoint) -> SymTensor3:
    """Third derivative of the Lorentz potential."""
    return SymTensor3(_jets(p.coords)[3])


def lorentz_potential_field(n: int) -> PotentialField:
    """Lorentz potential on R^{n+1}; analytic to order 3, fourth order by differences."""
    return PotentialField(
        dim=n + 1,
        value=lambda x: float(-np.log(x[0] ** 2 - x[1:] @ x[1:])),
        contains=_inside,
        jets={
            1: lambda x: _jets(x)[1],
            2: lambda x: _jets(x)[2],
            3: lambda x: _jets(x)[3],
        },
        name=f"lorentz[{n}]",
    )

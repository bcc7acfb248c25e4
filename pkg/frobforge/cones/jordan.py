"""Jordan product, trace form and Lie triple systems of Hermitian matrices."""

import itertools
import logging
from collections.abc import Sequence

import numpy as np

from frobforge.cones.models.cone_point import TangentVector
from frobforge.utils.constants import LIE_TRIPLE_TOL
from frobforge.utils.errors import ShapeMismatch

logger = logging.getLogger(__name__)


def _check_same(U: TangentVector, V: TangentVector) -> None:
    if (U.field, U.n) != (V.field, V.n):
        raise ShapeMismatch(f"Cannot combine {U.field.value}{U.n} with {V.field.value}{V.n}")


def jordan_product(U: TangentVector, V: TangentVector) -> TangentVector:
    """U ∘ V = (UV + VU) / 2."""
    _check_same(U, V)
    product = 0.5 * (U.matrix @ V.matrix + V.matrix @ U.matrix)
    return TangentVector.from_matrix(U.field, U.n, product)


def trace_form(U: TangentVector, V: TangentVector) -> float:
    """⟨U, V⟩ = Re tr(UV) over the ground field."""
    _check_same(U, V)
    return float(U.field.trace_scale * np.einsum("ij,ji->", U.matrix, V.matrix).real)


def _realvec(M: np.ndarray) -> np.ndarray:
    return np.concatenate([M.real.ravel(), M.imag.ravel()])


def lie_triple_check(basis: Sequence[TangentVector], tol: float = LIE_TRIPLE_TOL) -> bool:
    """True iff every [[a, b], c] of basis elements lies in their real span."""
    if not basis:
        return True
    for U in basis[1:]:
        _check_same(basis[0], U)
    S = np.stack([_realvec(U.matrix) for U in basis], axis=1)
    for a, b, c in itertools.product(basis, repeat=3):
        inner = a.matrix @ b.matrix - b.matrix @ a.matrix
        target = _realvec(inner @ c.matrix - c.matrix @ inner)
        coef, *_ = np.linalg.lstsq(S, target, rcond=None)
        residual = float(np.linalg.norm(S @ coef - target))
        if residual > tol * max(1.0, float(np.linalg.norm(target))):
            logger.debug(f"Double bracket leaves the span (residual {residual:.3e})")
            return False
    return True

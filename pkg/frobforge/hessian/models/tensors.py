"""Dense tensors at a point with declared index symmetries."""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Literal

import numpy as np

from frobforge.utils.constants import CURVATURE_SYMMETRY_TOL, SINGULAR_EIGENVALUE
from frobforge.utils.errors import ShapeMismatch, SingularMetric

logger = logging.getLogger(__name__)


def symmetrize_exact(entries: np.ndarray) -> np.ndarray:
    """Copy every entry from its sorted multi-index so all permutations agree bit for bit."""
    arr = np.asarray(entries, dtype=float)
    if arr.ndim < 2:
        return arr.copy()
    if len(set(arr.shape)) != 1:
        raise ShapeMismatch(f"Symmetric tensor must be square, got shape {arr.shape}")
    index = np.sort(np.indices(arr.shape).reshape(arr.ndim, -1), axis=0)
    return arr[tuple(index)].reshape(arr.shape)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SymTensor2:
    """Symmetric 2-tensor g_ij with a lazily computed inverse."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeMismatch(f"Metric must be a square matrix, got shape {arr.shape}")
        object.__setattr__(self, "entries", _frozen(symmetrize_exact(arr)))

    @property
    def dim(self) -> int:
        """Dimension of the underlying space."""
        return int(self.entries.shape[0])

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues."""
        return np.linalg.eigvalsh(self.entries)

    @property
    def is_positive_definite(self) -> bool:
        """Positive-definiteness witness: smallest eigenvalue > 0."""
        return bool(self.eigenvalues[0] > 0)

    @property
    def is_singular(self) -> bool:
        """Relative eigenvalue test for numerical singularity."""
        scale = max(1.0, float(np.max(np.abs(self.eigenvalues))))
        return bool(np.min(np.abs(self.eigenvalues)) < SINGULAR_EIGENVALUE * scale)

    @cached_property
    def inverse(self) -> np.ndarray:
        """Inverse metric g^ij."""
        if self.is_singular:
            raise SingularMetric(
                f"Metric eigenvalue {np.min(np.abs(self.eigenvalues)):.3e} is numerically zero"
            )
        inv = symmetrize_exact(np.linalg.inv(self.entries))
        inv.setflags(write=False)
        return inv

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """g(u, v)."""
        return float(u @ self.entries @ v)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"dim": self.dim, "index_order": "g[i][j]", "entries": self.entries.tolist()}


@dataclass(frozen=True, eq=False)
class SymTensor3:
    """Fully symmetric 3-tensor A_ijk, stored canonically from i <= j <= k."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 3:
            raise ShapeMismatch(f"Amplitude must have 3 indices, got shape {arr.shape}")
        object.__setattr__(self, "entries", _frozen(symmetrize_exact(arr)))

    @property
    def dim(self) -> int:
        """Dimension of the underlying space."""
        return int(self.entries.shape[0])

    def __call__(self, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> float:
        """A(u, v, w)."""
        return float(np.einsum("ijk,i,j,k->", self.entries, u, v, w))

    def restrict(self, basis: np.ndarray) -> "SymTensor3":
        """Pull back along the columns of ``basis``."""
        return SymTensor3(np.einsum("ijk,ia,jb,kc->abc", self.entries, basis, basis, basis))

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"dim": self.dim, "index_order": "A[i][j][k]", "entries": self.entries.tolist()}


@dataclass(frozen=True, eq=False)
class MixedTensor12:
    """Structure constants; ``entries[a, b, c]`` holds C^c_ab."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 3:
            raise ShapeMismatch(f"Structure constants need 3 indices, got shape {arr.shape}")
        # torsionless: C^c_ab = C^c_ba
        arr = np.where(
            np.arange(arr.shape[0])[:, None, None] <= np.arange(arr.shape[1])[None, :, None],
            arr,
            arr.transpose(1, 0, 2),
        )
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def dim(self) -> int:
        """Dimension of the underlying space."""
        return int(self.entries.shape[0])

    def product(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """u o v = C^c_ab u^a v^b."""
        return np.einsum("abc,a,b->c", self.entries, u, v)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "dim": self.dim,
            "index_order": "C[a][b][c] = C^c_ab",
            "entries": self.entries.tolist(),
        }


@dataclass(frozen=True, eq=False)
class Tensor4:
    """Four-index tensor tagged as a curvature or a residual."""

    entries: np.ndarray
    tag: Literal["curvature", "residual"] = "residual"
    index_order: str = field(default="T[a][b][c][d]", compare=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 4:
            raise ShapeMismatch(f"Tensor4 needs 4 indices, got shape {arr.shape}")
        object.__setattr__(self, "entries", _frozen(arr))
        if self.tag == "curvature":
            defect = self.symmetry_defect()
            if defect > CURVATURE_SYMMETRY_TOL * max(1.0, self.norm()):
                logger.warning(f"Curvature tensor violates its symmetries by {defect:.3e}")

    @property
    def dim(self) -> int:
        """Dimension of the underlying space."""
        return int(self.entries.shape[0])

    def norm(self) -> float:
        """max |T_abcd|."""
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0

    def symmetry_defect(self) -> float:
        """Largest violation of R_abcd = -R_bacd = -R_abdc = R_cdab."""
        r = self.entries
        return float(
            max(
                np.max(np.abs(r + r.transpose(1, 0, 2, 3))),
                np.max(np.abs(r + r.transpose(0, 1, 3, 2))),
                np.max(np.abs(r - r.transpose(2, 3, 0, 1))),
            )
        )

    def __call__(self, x: np.ndarray, y: np.ndarray, z: np.ndarray, w: np.ndarray) -> float:
        """T(x, y, z, w)."""
        return float(np.einsum("abcd,a,b,c,d->", self.entries, x, y, z, w))

    def __mul__(self, scale: float) -> "Tensor4":
        return Tensor4(self.entries * scale, self.tag, self.index_order)

    __rmul__ = __mul__

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "dim": self.dim,
            "tag": self.tag,
            "index_order": self.index_order,
            "entries": self.entries.tolist(),
        }

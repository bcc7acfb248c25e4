"""Points and tangent vectors of the symmetric cones P_n(R), P_n(C), P_n(H) and Λ_n."""

from dataclasses import dataclass
from enum import Enum
from functools import cache, cached_property
from typing import Any

import numpy as np

from frobforge.utils.constants import CONE_EIGENVALUE_RATIO
from frobforge.utils.errors import NotInCone, ShapeMismatch

# Imaginary quaternion units used for an off-diagonal entry a + b i + c j + d k.
_PARTS = {"R": 1, "C": 2, "H": 4}


class GroundField(Enum):
    """Ground field of a matrix cone.

    Complex matrices are stored as they are; a quaternion matrix X = A + jB
    (A, B complex) is stored through its complex embedding [[A, -B̄], [B, Ā]].
    """

    R = "R"
    C = "C"
    H = "H"

    @property
    def kappa(self) -> int:
        """Multiplicity dividing -log det of the real realification."""
        return 1 if self is GroundField.R else 2

    @property
    def trace_scale(self) -> float:
        """Factor turning Re tr of the stored matrix into the field's real trace."""
        return 0.5 if self is GroundField.H else 1.0

    def embed_size(self, n: int) -> int:
        """Side length of the stored complex matrix."""
        return 2 * n if self is GroundField.H else n

    def chart_dim(self, n: int) -> int:
        """Real dimension of the Hermitian matrices over the field."""
        return n + _PARTS[self.value] * n * (n - 1) // 2


def embed_quaternion(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Complex 2n x 2n embedding of X = A + jB."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    return np.block([[A, -B.conj()], [B, A.conj()]])


def quaternion_blocks(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split an embedded quaternion matrix into (A, B), checking the block form exactly."""
    m = M.shape[0]
    if m % 2:
        raise ShapeMismatch(f"Quaternion embedding must have even size, got {m}")
    n = m // 2
    A, B = M[:n, :n], M[n:, :n]
    if not (np.array_equal(M[:n, n:], -B.conj()) and np.array_equal(M[n:, n:], A.conj())):
        raise ShapeMismatch("Matrix is not of the block form [[A, -B̄], [B, Ā]]")
    return A, B


def realify_complex(M: np.ndarray) -> np.ndarray:
    """Real 2n x 2n realification [[Re, -Im], [Im, Re]] of a complex matrix."""
    M = np.asarray(M, dtype=complex)
    return np.block([[M.real, -M.imag], [M.imag, M.real]])


@cache
def chart_basis(n: int, field: GroundField) -> np.ndarray:
    """Stored matrices of the chart basis, shape (chart_dim, m, m).

    Order: diagonal entries E_ii, then for each i < j the real part
    (E_ij + E_ji), for C and H the imaginary part i(E_ij - E_ji), and for H
    the j and k parts carried by the B block.
    """
    m = field.embed_size(n)
    basis: list[np.ndarray] = []

    def stored(A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
        if field is GroundField.H:
            return embed_quaternion(A, np.zeros((n, n)) if B is None else B)
        return A.astype(complex)

    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1
        basis.append(stored(E))
    for i in range(n):
        for j in range(i + 1, n):
            sym = np.zeros((n, n), dtype=complex)
            sym[i, j] = sym[j, i] = 1
            basis.append(stored(sym))
            if field is GroundField.R:
                continue
            anti = np.zeros((n, n), dtype=complex)
            anti[i, j], anti[j, i] = 1j, -1j
            basis.append(stored(anti))
            if field is GroundField.H:
                skew = np.zeros((n, n), dtype=complex)
                skew[i, j], skew[j, i] = 1, -1
                basis.append(stored(np.zeros((n, n)), skew))
                basis.append(stored(np.zeros((n, n)), 1j * skew))
    out = np.stack(basis)
    assert out.shape == (field.chart_dim(n), m, m)
    out.setflags(write=False)
    return out


def coords_from_matrix(M: np.ndarray, n: int, field: GroundField) -> np.ndarray:
    """Read chart coordinates directly from the stored entries."""
    A = M[:n, :n]
    coords = [A[i, i].real for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            coords.append(A[i, j].real)
            if field is GroundField.R:
                continue
            coords.append(A[i, j].imag)
            if field is GroundField.H:
                B = M[n:, :n]
                coords.extend((B[i, j].real, B[i, j].imag))
    return np.array(coords, dtype=float)


def matrix_from_coords(coords: np.ndarray, n: int, field: GroundField) -> np.ndarray:
    """Inverse of :func:`coords_from_matrix`, assembled entrywise."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (field.chart_dim(n),):
        raise ShapeMismatch(f"Expected {field.chart_dim(n)} chart coordinates, got {coords.shape}")
    A = np.zeros((n, n), dtype=complex)
    B = np.zeros((n, n), dtype=complex)
    A[np.arange(n), np.arange(n)] = coords[:n]
    pos = n
    for i in range(n):
        for j in range(i + 1, n):
            re = coords[pos]
            im = coords[pos + 1] if field is not GroundField.R else 0.0
            A[i, j] = complex(re, im)
            A[j, i] = complex(re, -im)
            pos += 1 if field is GroundField.R else 2
            if field is GroundField.H:
                B[i, j] = complex(coords[pos], coords[pos + 1])
                B[j, i] = -B[i, j]
                pos += 2
    return embed_quaternion(A, B) if field is GroundField.H else A


def _check_hermitian(M: np.ndarray, n: int, field: GroundField) -> None:
    m = field.embed_size(n)
    if M.shape != (m, m):
        raise ShapeMismatch(f"Expected a {m}x{m} stored matrix for {field.value}{n}, got {M.shape}")
    if not np.array_equal(M, M.conj().T):
        raise ShapeMismatch("Matrix is not exactly Hermitian")
    if field is GroundField.R and np.any(M.imag != 0):
        raise ShapeMismatch("Real cone point has imaginary entries")
    if field is GroundField.H:
        quaternion_blocks(M)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Hermitian matrix over the ground field, in stored form."""

    field: GroundField
    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        M = np.array(self.matrix, dtype=complex)
        _check_hermitian(M, self.n, self.field)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_coords(cls, field: GroundField, n: int, coords: np.ndarray) -> "TangentVector":
        """Build from chart coordinates."""
        return cls(field, n, matrix_from_coords(coords, n, field))

    @classmethod
    def from_matrix(cls, field: GroundField, n: int, M: np.ndarray) -> "TangentVector":
        """Project a nearly Hermitian matrix onto the chart and rebuild it exactly."""
        M = np.asarray(M, dtype=complex)
        return cls.from_coords(field, n, coords_from_matrix(0.5 * (M + M.conj().T), n, field))

    @cached_property
    def coords(self) -> np.ndarray:
        """Chart coordinates."""
        return coords_from_matrix(self.matrix, self.n, self.field)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.field, self.n, self.matrix + other.matrix)

    def __mul__(self, scale: float) -> "TangentVector":
        return TangentVector(self.field, self.n, self.matrix * scale)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ConePoint:
    """Positive-definite Hermitian matrix over R, C or H, in stored form."""

    field: GroundField
    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        M = np.array(self.matrix, dtype=complex)
        _check_hermitian(M, self.n, self.field)
        eig = np.linalg.eigvalsh(M)
        if eig[0] <= 0 or eig[0] <= CONE_EIGENVALUE_RATIO * eig[-1]:
            raise NotInCone(f"Smallest eigenvalue {eig[0]:.3e} is not positive (max {eig[-1]:.3e})")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_coords(cls, field: GroundField, n: int, coords: np.ndarray) -> "ConePoint":
        """Build from chart coordinates."""
        return cls(field, n, matrix_from_coords(coords, n, field))

    @classmethod
    def from_matrix(cls, field: GroundField, n: int, M: np.ndarray) -> "ConePoint":
        """Project a nearly Hermitian matrix onto the chart and rebuild it exactly."""
        M = np.asarray(M, dtype=complex)
        return cls.from_coords(field, n, coords_from_matrix(0.5 * (M + M.conj().T), n, field))

    @classmethod
    def identity(cls, field: GroundField, n: int) -> "ConePoint":
        """The identity matrix."""
        return cls(field, n, np.eye(field.embed_size(n), dtype=complex))

    @cached_property
    def coords(self) -> np.ndarray:
        """Chart coordinates."""
        return coords_from_matrix(self.matrix, self.n, self.field)

    @cached_property
    def inverse(self) -> np.ndarray:
        """Stored inverse matrix."""
        return np.linalg.inv(self.matrix)

    def to_dict(self) -> dict[str, Any]:
        """Field tag, size and row-major entries as [re, im] pairs of the n x n matrix."""
        if self.field is GroundField.H:
            A, B = quaternion_blocks(self.matrix)
            entries = {
                "A": [[[z.real, z.imag] for z in row] for row in A],
                "B": [[[z.real, z.imag] for z in row] for row in B],
            }
        else:
            entries = {"M": [[[z.real, z.imag] for z in row] for row in self.matrix]}
        return {"field": self.field.value, "n": self.n, "entries": entries}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ConePoint":
        """Create instance from dictionary."""
        field = GroundField(data["field"])
        n = int(data["n"])

        def unpack(rows: list[list[list[float]]]) -> np.ndarray:
            return np.array([[complex(re, im) for re, im in row] for row in rows])

        entries = data["entries"]
        if field is GroundField.H:
            return cls(field, n, embed_quaternion(unpack(entries["A"]), unpack(entries["B"])))
        return cls(field, n, unpack(entries["M"]))


@dataclass(frozen=True, eq=False)
class QuaternionMatrix:
    """Quaternion matrix a + b i + c j + d k with real component arrays."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __matmul__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = other.a, other.b, other.c, other.d
        return QuaternionMatrix(
            a1 @ a2 - b1 @ b2 - c1 @ c2 - d1 @ d2,
            a1 @ b2 + b1 @ a2 + c1 @ d2 - d1 @ c2,
            a1 @ c2 - b1 @ d2 + c1 @ a2 + d1 @ b2,
            a1 @ d2 + b1 @ c2 - c1 @ b2 + d1 @ a2,
        )

    def adjoint(self) -> "QuaternionMatrix":
        """Quaternionic conjugate transpose."""
        return QuaternionMatrix(self.a.T, -self.b.T, -self.c.T, -self.d.T)

    def embed(self) -> np.ndarray:
        """Complex embedding, with c j + d k = j (c - d i)."""
        return embed_quaternion(self.a + 1j * self.b, self.c - 1j * self.d)


@dataclass(frozen=True)
class LorentzPoint:
    """Point (x0, x) of the Lorentz cone x0 > |x|."""

    x0: float
    x: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if not self.x0 > np.sqrt(sum(v * v for v in self.x)):
            raise NotInCone(f"Point ({self.x0}, {self.x}) is not inside the Lorentz cone")

    @property
    def coords(self) -> np.ndarray:
        """(x0, x1, ..., xn)."""
        return np.array([self.x0, *self.x])

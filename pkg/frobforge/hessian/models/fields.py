"""Scalar potentials and vector fields with analytic or finite-difference derivatives."""

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from frobforge.utils.constants import FD_STEP
from frobforge.utils.errors import DomainError, ParamOutOfRange

ArrayFn = Callable[[np.ndarray], np.ndarray]
MAX_ORDER = 4


def central_difference(fn: ArrayFn, x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Gradient of an array-valued function, prepended as a new leading axis.

    Central differences at steps h and h/2 are combined by one Richardson
    extrapolation, (4 D(h/2) - D(h)) / 3, which cancels the h^2 error term.
    """
    x = np.asarray(x, dtype=float)
    slices = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = 1.0
        coarse = (np.asarray(fn(x + h * e)) - np.asarray(fn(x - h * e))) / (2 * h)
        fine = (np.asarray(fn(x + 0.5 * h * e)) - np.asarray(fn(x - 0.5 * h * e))) / h
        slices.append((4.0 * fine - coarse) / 3.0)
    return np.stack(slices, axis=0)


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Scalar potential on an open coordinate domain.

    ``jets`` maps an order k to a closure returning the full k-th derivative
    tensor; orders without a closure are obtained by nested central
    differences of the next lower order.
    """

    dim: int
    value: Callable[[np.ndarray], float]
    contains: Callable[[np.ndarray], bool] = field(default=lambda _x: True)
    jets: Mapping[int, ArrayFn] = field(default_factory=dict)
    h: float = FD_STEP
    name: str = "potential"

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ParamOutOfRange(f"Potential dimension must be positive, got {self.dim}")
        if not self.h > 0:
            raise ParamOutOfRange(f"Finite-difference step must be positive, got {self.h}")
        object.__setattr__(self, "jets", MappingProxyType(dict(self.jets)))

    @property
    def mode(self) -> str:
        """``analytic`` when any derivative closure is supplied, else ``finite-difference``."""
        return "analytic" if self.jets else "finite-difference"

    def analytic_order(self) -> int:
        """Highest order reachable without finite differences."""
        order = 0
        while order + 1 in self.jets:
            order += 1
        return order

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"{self.name}: expected shape ({self.dim},), got {x.shape}")
        if not self.contains(x):
            raise DomainError(f"{self.name}: point {x} lies outside the domain")
        return x

    def eval(self, x: np.ndarray) -> float:
        """Value of the potential at x."""
        return float(self.value(self._check(x)))

    def derivative(self, x: np.ndarray, order: int) -> np.ndarray:
        """Full derivative tensor of the given order, shape (dim,) * order."""
        if not 0 <= order <= MAX_ORDER + 1:
            raise ParamOutOfRange(f"Derivative order {order} not supported")
        x = self._check(x)
        return self._derivative(x, order)

    def _derivative(self, x: np.ndarray, order: int) -> np.ndarray:
        if order == 0:
            return np.asarray(self.value(x), dtype=float)
        jet = self.jets.get(order)
        if jet is not None:
            return np.asarray(jet(x), dtype=float)

        def lower(y: np.ndarray) -> np.ndarray:
            if not self.contains(y):
                raise DomainError(f"{self.name}: stencil point {y} leaves the domain")
            return self._derivative(y, order - 1)

        return central_difference(lower, x, self.h)

    def partial(self, x: np.ndarray, multi_index: tuple[int, ...]) -> float:
        """A single partial derivative ∂_{i1}...∂_{ik} Φ(x)."""
        if any(not 0 <= i < self.dim for i in multi_index):
            raise ParamOutOfRange(f"Multi-index {multi_index} out of range for dim {self.dim}")
        return float(self.derivative(x, len(multi_index))[tuple(multi_index)])

    def finite_difference(self, keep: int = 0) -> "PotentialField":
        """Copy that keeps only analytic derivatives up to ``keep``."""
        jets = {k: fn for k, fn in self.jets.items() if k <= keep}
        return PotentialField(self.dim, self.value, self.contains, jets, self.h, self.name)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Vector field E = E^m(x) ∂_m with first and second partials."""

    dim: int
    components: ArrayFn
    jacobian_fn: ArrayFn | None = None
    hessian_fn: ArrayFn | None = None
    h: float = FD_STEP
    name: str = "field"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Components E^m(x)."""
        return np.asarray(self.components(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """``J[m, a] = ∂_a E^m``."""
        if self.jacobian_fn is not None:
            return np.asarray(self.jacobian_fn(np.asarray(x, dtype=float)), dtype=float)
        return np.moveaxis(central_difference(self, x, self.h), 0, -1)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        """``H[m, a, b] = ∂_a ∂_b E^m``."""
        if self.hessian_fn is not None:
            return np.asarray(self.hessian_fn(np.asarray(x, dtype=float)), dtype=float)
        return np.moveaxis(central_difference(self.jacobian, x, self.h), 0, -1)

    @classmethod
    def affine(cls, matrix: np.ndarray, offset: np.ndarray | None = None) -> "VectorField":
        """E^m = a^m_j x^j + b^m."""
        a = np.asarray(matrix, dtype=float)
        b = np.zeros(a.shape[0]) if offset is None else np.asarray(offset, dtype=float)
        dim = a.shape[0]
        return cls(
            dim=dim,
            components=lambda x: a @ x + b,
            jacobian_fn=lambda _x: a,
            hessian_fn=lambda _x: np.zeros((dim, dim, dim)),
            name="affine",
        )

    @classmethod
    def radial(cls, dim: int, scale: float = 1.0) -> "VectorField":
        """Dilation field scale * Σ x^a ∂_a."""
        return cls.affine(scale * np.eye(dim)).renamed("radial")

    def renamed(self, name: str) -> "VectorField":
        """Copy under a new name."""
        return VectorField(
            self.dim, self.components, self.jacobian_fn, self.hessian_fn, self.h, name
        )

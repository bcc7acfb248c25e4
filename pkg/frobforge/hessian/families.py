"""Built-in potential families and the declarative potential spec loader."""

import json
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
from rapidfuzz import process

from frobforge.hessian.models.fields import PotentialField
from frobforge.utils.constants import FD_STEP
from frobforge.utils.errors import ParamOutOfRange, UsageError

logger = logging.getLogger(__name__)

Factory = Callable[..., PotentialField]


def _diag_tensor(values: np.ndarray, order: int) -> np.ndarray:
    out = np.zeros((values.size,) * order)
    idx = np.arange(values.size)
    out[(idx,) * order] = values
    return out


def quadratic(dim: int = 2, matrix: list[list[float]] | None = None) -> PotentialField:
    """Φ = 1/2 xᵀQx; flat, with vanishing amplitude."""
    Q = np.eye(dim) if matrix is None else np.asarray(matrix, dtype=float)
    zeros3 = np.zeros((dim,) * 3)
    zeros4 = np.zeros((dim,) * 4)
    return PotentialField(
        dim=dim,
        value=lambda x: 0.5 * float(x @ Q @ x),
        jets={1: lambda x: Q @ x, 2: lambda _x: Q, 3: lambda _x: zeros3, 4: lambda _x: zeros4},
        name="quadratic",
    )


def neg_log(dim: int = 1) -> PotentialField:
    """Φ = -Σ log x_i on the positive orthant."""
    return PotentialField(
        dim=dim,
        value=lambda x: -float(np.sum(np.log(x))),
        contains=lambda x: bool(np.all(x > 0)),
        jets={
            1: lambda x: -1.0 / x,
            2: lambda x: _diag_tensor(1.0 / x**2, 2),
            3: lambda x: _diag_tensor(-2.0 / x**3, 3),
            4: lambda x: _diag_tensor(6.0 / x**4, 4),
        },
        name="neg_log",
    )


def exp_quadratic(dim: int = 2) -> PotentialField:
    """Φ = exp(|x|²/2); a curved Hessian metric in every dimension >= 2."""
    I = np.eye(dim)

    def jet3(x: np.ndarray) -> np.ndarray:
        sym = np.einsum("ij,k->ijk", I, x)
        sym = sym + np.einsum("ik,j->ijk", I, x) + np.einsum("jk,i->ijk", I, x)
        return (sym + np.einsum("i,j,k->ijk", x, x, x)) * np.exp(0.5 * x @ x)

    def jet4(x: np.ndarray) -> np.ndarray:
        out = (
            np.einsum("ij,kl->ijkl", I, I)
            + np.einsum("ik,jl->ijkl", I, I)
            + np.einsum("il,jk->ijkl", I, I)
        )
        xx = np.outer(x, x)
        for pair in ("ij,kl", "ik,jl", "il,jk", "kl,ij", "jl,ik", "jk,il"):
            out = out + np.einsum(f"{pair}->ijkl", I, xx)
        out = out + np.einsum("i,j,k,l->ijkl", x, x, x, x)
        return out * np.exp(0.5 * x @ x)

    return PotentialField(
        dim=dim,
        value=lambda x: float(np.exp(0.5 * x @ x)),
        jets={
            1: lambda x: x * np.exp(0.5 * x @ x),
            2: lambda x: (I + np.outer(x, x)) * np.exp(0.5 * x @ x),
            3: jet3,
            4: jet4,
        },
        name="exp_quadratic",
    )


def kink() -> PotentialField:
    """Φ = |x| y³ / 6: third derivatives are analytic, the fourth jumps across x = 0."""

    def jet3(z: np.ndarray) -> np.ndarray:
        x, y = z
        out = np.zeros((2, 2, 2))
        out[1, 1, 1] = abs(x)
        out[0, 1, 1] = out[1, 0, 1] = out[1, 1, 0] = np.sign(x) * y
        return out

    def jet2(z: np.ndarray) -> np.ndarray:
        x, y = z
        return np.array([[0.0, np.sign(x) * y**2 / 2], [np.sign(x) * y**2 / 2, abs(x) * y]])

    return PotentialField(
        dim=2,
        value=lambda z: abs(z[0]) * z[1] ** 3 / 6,
        jets={
            1: lambda z: np.array([np.sign(z[0]) * z[1] ** 3 / 6, abs(z[0]) * z[1] ** 2 / 2]),
            2: jet2,
            3: jet3,
        },
        name="kink",
    )


def log_det(n: int = 2, field: str = "R") -> PotentialField:
    """-log det on the chart of the symmetric cone P_n(field)."""
    from frobforge.cones.geometry import cone_potential_field  # noqa: PLC0415
    from frobforge.cones.models.cone_point import GroundField  # noqa: PLC0415

    return cone_potential_field(n, GroundField(field))


def diagonal_log_det(n: int = 3, field: str = "R") -> PotentialField:
    """-log det restricted to real diagonal matrices of P_n(field)."""
    base = neg_log(n)
    return PotentialField(
        dim=n,
        value=base.value,
        contains=base.contains,
        jets=dict(base.jets),
        name=f"diagonal_log_det[{field}{n}]",
    )


def lorentz(n: int = 2) -> PotentialField:
    """-log(x0² - Σ x_i²) on the Lorentz cone of dimension n + 1."""
    from frobforge.cones.lorentz import lorentz_potential_field  # noqa: PLC0415

    return lorentz_potential_field(n)


class PotentialRegistry:
    """Name -> factory lookup for potential families."""

    def __init__(self) -> None:
        self._factories: dict[str, Factory] = {}

    def register(self, name: str, factory: Factory) -> None:
        """Register a factory; names are unique."""
        if name in self._factories:
            raise ValueError(f"Potential family {name!r} is already registered")
        self._factories[name] = factory

    def names(self) -> list[str]:
        """Registered family names in sorted order."""
        return sorted(self._factories)

    def suggest(self, name: str) -> str | None:
        """Closest registered name, if any is reasonably close."""
        match = process.extractOne(name, self.names(), score_cutoff=60)
        return match[0] if match else None

    def create(self, name: str, **params: Any) -> PotentialField:
        """Instantiate a family with parameters."""
        factory = self._factories.get(name)
        if factory is None:
            hint = self.suggest(name)
            message = f"Unknown potential family {name!r}"
            if hint:
                message += f"; did you mean {hint!r}?"
            raise UsageError(message)
        try:
            return factory(**params)
        except TypeError as e:
            raise UsageError(f"Bad parameters for {name!r}: {e}") from e


registry = PotentialRegistry()
for _name, _factory in (
    ("quadratic", quadratic),
    ("neg_log", neg_log),
    ("exp_quadratic", exp_quadratic),
    ("kink", kink),
    ("log_det", log_det),
    ("diagonal_log_det", diagonal_log_det),
    ("lorentz", lorentz),
):
    registry.register(_name, _factory)


def potential_from_spec(spec: dict[str, Any]) -> PotentialField:
    """Build a potential from ``{"family", "params", "mode", "fd_step"}``."""
    if "family" not in spec:
        raise UsageError("Potential spec needs a 'family' entry")
    p = registry.create(spec["family"], **spec.get("params", {}))
    mode = spec.get("mode", "analytic")
    step = float(spec.get("fd_step", FD_STEP))
    if mode == "finite-difference":
        keep = int(spec.get("analytic_orders", 0))
        p = p.finite_difference(keep)
    elif mode != "analytic":
        raise ParamOutOfRange(f"Unknown derivative mode {mode!r}")
    if step != p.h:
        p = PotentialField(p.dim, p.value, p.contains, dict(p.jets), step, p.name)
    logger.info(f"Loaded potential {p.name} (dim {p.dim}, {p.mode}, h={p.h})")
    return p


def load_potential_spec(path: Path | str) -> PotentialField:
    """Load a potential spec from a JSON file."""
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"Cannot read potential spec {path}: {e}") from e
    return potential_from_spec(spec)

"""Phase-space wave fields, Hamiltonians and fiber points."""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np

from frobforge.transport.models.grid import Grid2D
from frobforge.utils.errors import ParamOutOfRange, ShapeMismatch

logger = logging.getLogger(__name__)

PhaseFn = Callable[[np.ndarray, np.ndarray], np.ndarray]

PARTIALS_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex amplitude ψ(q, p) on a phase-space grid (axis 0 is q, axis 1 is p)."""

    grid: Grid2D
    psi: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.psi, dtype=complex)
        if arr.shape != self.grid.shape:
            raise ShapeMismatch(f"Wave field has shape {arr.shape}, grid expects {self.grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise ParamOutOfRange("Wave field must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "psi", arr)

    @classmethod
    def gaussian_packet(
        cls,
        grid: Grid2D,
        center: tuple[float, float],
        width: float,
        momentum: tuple[float, float] = (0.0, 0.0),
    ) -> "WaveField":
        """Normalized packet whose density is a Gaussian of standard deviation ``width``."""
        if not width > 0:
            raise ParamOutOfRange(f"Packet width must be positive, got {width}")
        Q, P = grid.mesh
        dq, dp = Q - center[0], P - center[1]
        envelope = np.exp(-(dq**2 + dp**2) / (4 * width**2))
        phase = np.exp(1j * (momentum[0] * Q + momentum[1] * P))
        return cls(grid, envelope * phase).normalized()

    @property
    def norm2(self) -> float:
        """Σ |ψ|² h²."""
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.cell_measure)

    def normalized(self) -> "WaveField":
        """Copy with unit norm."""
        n2 = self.norm2
        if not n2 > 0:
            raise ParamOutOfRange("Cannot normalize a zero wave field")
        return WaveField(self.grid, self.psi / np.sqrt(n2))

    def inner(self, other: "WaveField") -> complex:
        """⟨self, other⟩ = Σ conj(ψ) φ h²."""
        if other.grid.shape != self.grid.shape:
            raise ShapeMismatch("Wave fields live on different grids")
        return complex(np.vdot(self.psi, other.psi) * self.grid.cell_measure)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "grid": self.grid.to_dict(),
            "norm2": self.norm2,
            "real": self.psi.real.tolist(),
            "imag": self.psi.imag.tolist(),
        }


@dataclass(frozen=True)
class Hamiltonian:
    """H(q, p) with analytic partials; ``omega`` is set for the harmonic oscillator only."""

    name: str
    value: PhaseFn
    dq: PhaseFn
    dp: PhaseFn
    omega: float | None = None

    @classmethod
    def harmonic(cls, omega: float = 1.0) -> "Hamiltonian":
        """H = ω (q² + p²) / 2."""
        return cls(
            "harmonic",
            lambda q, p: 0.5 * omega * (q**2 + p**2),
            lambda q, p: omega * q,
            lambda q, p: omega * p,
            omega,
        )

    @classmethod
    def pendulum(cls) -> "Hamiltonian":
        """H = p² / 2 - cos q."""
        return cls(
            "pendulum",
            lambda q, p: 0.5 * p**2 - np.cos(q),
            lambda q, p: np.sin(q),
            lambda q, p: p * np.ones_like(q),
        )

    @classmethod
    def zero(cls) -> "Hamiltonian":
        """H ≡ 0."""
        return cls(
            "zero",
            lambda q, p: np.zeros_like(q * p),
            lambda q, p: np.zeros_like(q * p),
            lambda q, p: np.zeros_like(q * p),
        )

    @classmethod
    def by_name(cls, name: str) -> "Hamiltonian":
        """Factory lookup used by the command line."""
        factories = {"harmonic": cls.harmonic, "pendulum": cls.pendulum, "zero": cls.zero}
        if name not in factories:
            raise ParamOutOfRange(
                f"Unknown Hamiltonian {name!r}, expected one of {sorted(factories)}"
            )
        return factories[name]()

    def velocity(self, q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Hamilton's equations: (q', p') = (H_p, -H_q)."""
        return self.dp(q, p), -self.dq(q, p)

    def check_partials(self, gen: np.random.Generator, samples: int = 20) -> float:
        """Largest gap between the analytic partials and central differences."""
        q, p = gen.uniform(-2.0, 2.0, samples), gen.uniform(-2.0, 2.0, samples)
        h = PARTIALS_STEP
        fd_q = (self.value(q + h, p) - self.value(q - h, p)) / (2 * h)
        fd_p = (self.value(q, p + h) - self.value(q, p - h)) / (2 * h)
        gap_q = np.max(np.abs(fd_q - self.dq(q, p)))
        gap_p = np.max(np.abs(fd_p - self.dp(q, p)))
        return float(max(gap_q, gap_p))


@dataclass(frozen=True)
class FiberPoint:
    """Point ψ on a hypersurface with density coordinates ρ_i = |ψ_i|²."""

    psi: tuple[complex, ...]

    @property
    def rho(self) -> np.ndarray:
        """|ψ_i|² per coordinate."""
        z = np.asarray(self.psi, dtype=complex)
        return z.real**2 + z.imag**2

    def act(self, theta: np.ndarray | float) -> "FiberPoint":
        """Multiply each coordinate by a unit phase."""
        phases = np.exp(1j * np.broadcast_to(np.asarray(theta, dtype=float), (len(self.psi),)))
        return FiberPoint(tuple(complex(z) for z in np.asarray(self.psi) * phases))

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "psi": [[z.real, z.imag] for z in self.psi],
            "rho": self.rho.tolist(),
        }

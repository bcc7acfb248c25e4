"""Liouville evolution of phase-space fields and the density projection."""

import logging
import math
import warnings
from collections.abc import Sequence
from typing import TypeVar

import numpy as np
from scipy import fft, ndimage

from frobforge.kvn.models.wave import Hamiltonian, WaveField
from frobforge.transport.models.grid import Grid2D, GridDensity
from frobforge.utils.constants import CFL_CELLS, INNER_TOL, MAX_SUBSTEP, NORM_TOL, TORUS_TOL
from frobforge.utils.errors import CFLWarning, ParamOutOfRange, ShapeMismatch
from frobforge.utils.reporting import CheckResult, Report

logger = logging.getLogger(__name__)

Field = TypeVar("Field", WaveField, GridDensity)


def density_projection(psi: WaveField) -> GridDensity:
    """ρ = |ψ|² node by node."""
    rho = psi.psi.real**2 + psi.psi.imag**2
    return GridDensity(psi.grid, rho)


def torus_act(psi: WaveField, theta: float | np.ndarray) -> WaveField:
    """Multiply by the unit phase exp(iθ); θ may vary from node to node."""
    return WaveField(psi.grid, psi.psi * np.exp(1j * np.asarray(theta, dtype=float)))


def fiber_equivalent(psi1: WaveField, psi2: WaveField, tol: float = TORUS_TOL) -> bool:
    """Same density up to ``tol`` relative to max(1, max ρ)."""
    if psi1.grid.shape != psi2.grid.shape or psi1.grid.bounds != psi2.grid.bounds:
        raise ShapeMismatch("Wave fields live on different grids")
    r1, r2 = density_projection(psi1).mass, density_projection(psi2).mass
    scale = max(1.0, float(r1.max()), float(r2.max()))
    return bool(np.max(np.abs(r1 - r2)) <= tol * scale)


def _fourier_shift(values: np.ndarray, shifts: np.ndarray, axis: int, h: float) -> np.ndarray:
    """g(x) = f(x + s) along ``axis``, with one shift per line of the other axis."""
    n = values.shape[axis]
    k = 2 * np.pi * fft.fftfreq(n, d=h)
    spectrum = fft.fft(values, axis=axis)
    if axis == 0:
        factor = np.exp(1j * np.outer(k, shifts))
    else:
        factor = np.exp(1j * np.outer(shifts, k))
    return fft.ifft(spectrum * factor, axis=axis)


def _rotate(values: np.ndarray, grid: Grid2D, angle: float) -> np.ndarray:
    """f(q cos a - p sin a, q sin a + p cos a) by three Fourier shears."""
    a, b = -math.tan(angle / 2), math.sin(angle)
    out = values.astype(complex)
    out = _fourier_shift(out, a * grid.y, axis=0, h=grid.h)
    out = _fourier_shift(out, b * grid.x, axis=1, h=grid.h)
    return _fourier_shift(out, a * grid.y, axis=0, h=grid.h)


def _harmonic_pullback(values: np.ndarray, grid: Grid2D, angle: float) -> np.ndarray:
    angle = math.remainder(angle, 2 * math.pi)
    # Shears stay well conditioned for |angle| <= π/2.
    if abs(angle) > math.pi / 2:
        angle /= 2
        values = _rotate(values, grid, angle)
    return _rotate(values, grid, angle)


def backward_characteristics(
    H: Hamiltonian, grid: Grid2D, t: float, dt: float | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Foot points flow⁻ᵗ(q, p) of every node by RK4.

    Steps never exceed ``MAX_SUBSTEP``; a requested ``dt`` that moves points
    more than ``CFL_CELLS`` cells per step is subdivided with a CFLWarning.
    """
    Q, P = (m.copy() for m in grid.mesh)
    if t == 0:
        return Q, P
    step = MAX_SUBSTEP if dt is None else abs(dt)
    if not step > 0:
        raise ParamOutOfRange(f"Time step must be positive, got {dt}")
    vq, vp = H.velocity(Q, P)
    speed = float(np.max(np.hypot(vq, vp)))
    if speed * step > CFL_CELLS * grid.h:
        safe = CFL_CELLS * grid.h / speed
        warnings.warn(
            f"Step {step:g} moves {speed * step / grid.h:.1f} cells; subdividing to {safe:.3g}",
            CFLWarning,
            stacklevel=2,
        )
        step = safe
    step = min(step, MAX_SUBSTEP)
    n = max(1, math.ceil(abs(t) / step))
    tau = -t / n

    def f(q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return H.velocity(q, p)

    for _ in range(n):
        k1 = f(Q, P)
        k2 = f(Q + 0.5 * tau * k1[0], P + 0.5 * tau * k1[1])
        k3 = f(Q + 0.5 * tau * k2[0], P + 0.5 * tau * k2[1])
        k4 = f(Q + tau * k3[0], P + tau * k3[1])
        Q = Q + tau / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        P = P + tau / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    logger.debug(f"{H.name}: {n} RK4 steps of {abs(tau):.3g} for t = {t}")
    return Q, P


def _pullback(values: np.ndarray, grid: Grid2D, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Bicubic spline evaluation of ``values`` at the foot points; zero outside."""
    coords = np.moveaxis(grid.fractional_index(np.stack([Q, P], -1)), -1, 0)
    nearest = np.round(coords)
    coords = np.where(np.abs(coords - nearest) < 1e-9, nearest, coords)

    def spline(v: np.ndarray) -> np.ndarray:
        return ndimage.map_coordinates(v, coords, order=3, mode="constant", cval=0.0)

    if np.iscomplexobj(values):
        return spline(values.real) + 1j * spline(values.imag)
    return spline(values)


def _evolve_values(
    values: np.ndarray, grid: Grid2D, H: Hamiltonian, t: float, dt: float | None
) -> np.ndarray:
    if H.omega is not None:
        return _harmonic_pullback(values, grid, H.omega * t)
    Q, P = backward_characteristics(H, grid, t, dt)
    return _pullback(values, grid, Q, P)


def liouville_evolve(field: Field, H: Hamiltonian, t: float, dt: float | None = None) -> Field:
    """Transport a wave field or density along the flow q' = H_p, p' = -H_q for time t.

    The harmonic oscillator is rotated exactly in Fourier space; other
    Hamiltonians are pulled back along RK4 characteristics.
    """
    if not math.isfinite(t):
        raise ParamOutOfRange(f"Evolution time must be finite, got {t}")
    if isinstance(field, WaveField):
        return WaveField(field.grid, _evolve_values(field.psi, field.grid, H, t, dt))
    values = _evolve_values(field.mass, field.grid, H, t, dt)
    rho = np.real(values)
    negative = float(-rho[rho < 0].sum()) * field.grid.cell_measure
    if negative > 0:
        logger.debug(f"Clipped {negative:.3e} of negative mass after interpolation")
    return GridDensity(field.grid, np.clip(rho, 0.0, None))


def evolve_snapshots(field: Field, H: Hamiltonian, times: Sequence[float]) -> list[Field]:
    """Field at each requested time, each evolved from the initial state."""
    return [liouville_evolve(field, H, t) for t in times]


def center_of_mass(field: WaveField | GridDensity) -> np.ndarray:
    """(q̄, p̄) of the density."""
    density = density_projection(field) if isinstance(field, WaveField) else field
    return density.mean()


def evolution_commutes_with_projection(psi: WaveField, H: Hamiltonian, t: float) -> float:
    """‖|U_t ψ|² - U_t |ψ|²‖₁."""
    left = density_projection(liouville_evolve(psi, H, t))
    right = liouville_evolve(density_projection(psi), H, t)
    return float(np.sum(np.abs(left.mass - right.mass)) * psi.grid.cell_measure)


def unitarity_check(
    psi: WaveField,
    H: Hamiltonian,
    times: Sequence[float],
    others: Sequence[WaveField] = (),
    norm_tol: float = NORM_TOL,
    inner_tol: float = INNER_TOL,
) -> Report:
    """Norm drift of ψ and inner-product drift against ``others`` at each time."""
    report = Report("unitarity")
    for t in times:
        evolved = liouville_evolve(psi, H, t)
        drift = abs(evolved.norm2 - psi.norm2)
        report.add(CheckResult(f"norm[{H.name}, t={t:g}]", drift, norm_tol))
        if others:
            worst = max(
                abs(evolved.inner(liouville_evolve(phi, H, t)) - psi.inner(phi)) for phi in others
            )
            report.add(CheckResult(f"inner[{H.name}, t={t:g}]", worst, inner_tol, len(others)))
    return report

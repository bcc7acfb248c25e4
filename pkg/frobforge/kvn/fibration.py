"""Points on {W = 0} and their density coordinates ρ_i = |ψ_i|²."""

import logging

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from frobforge.bhk.models.polynomial import InvertiblePolynomial
from frobforge.bhk.weights import weights
from frobforge.kvn.models.wave import FiberPoint
from frobforge.utils.constants import ROOT_RETRIES, ROOT_TOL
from frobforge.utils.errors import ParamOutOfRange, RootFindFailure
from frobforge.utils.sampling import rng

logger = logging.getLogger(__name__)

NEWTON_STEPS = 8


def evaluate(P: InvertiblePolynomial, z: np.ndarray) -> complex:
    """W(z) = Σ_i Π_j z_j^E_ij."""
    E = np.asarray(P.exponents)
    return complex(np.sum(np.prod(np.asarray(z, dtype=complex) ** E, axis=1)))


def gradient(P: InvertiblePolynomial, z: np.ndarray) -> np.ndarray:
    """Holomorphic gradient ∂W/∂z_j."""
    E = np.asarray(P.exponents)
    z = np.asarray(z, dtype=complex)
    out = np.zeros(P.n, dtype=complex)
    for j in range(P.n):
        lowered = E.copy()
        lowered[:, j] = np.maximum(E[:, j] - 1, 0)
        out[j] = np.sum(E[:, j] * np.prod(z**lowered, axis=1))
    return out


def _restriction(P: InvertiblePolynomial, base: np.ndarray, direction: np.ndarray) -> Polynomial:
    """t -> W(base + t·direction) as a polynomial in t."""
    total = Polynomial([0j])
    for row in P.exponents:
        term = Polynomial([1 + 0j])
        for j, e in enumerate(row):
            if e:
                term = term * Polynomial([base[j], direction[j]]) ** e
        total = total + term
    return total


def _refine(P: InvertiblePolynomial, z: np.ndarray) -> np.ndarray:
    """Newton steps along the conjugate gradient until |W| ≤ ROOT_TOL."""
    for _ in range(NEWTON_STEPS):
        w = evaluate(P, z)
        if abs(w) <= ROOT_TOL:
            break
        g = gradient(P, z)
        norm = float(np.vdot(g, g).real)
        if norm == 0:
            break
        z = z - w * np.conj(g) / norm
    return z


def line_roots(
    P: InvertiblePolynomial, base: np.ndarray, direction: np.ndarray
) -> list[np.ndarray]:
    """Points of {W = 0} on the complex line base + t·direction."""
    base = np.asarray(base, dtype=complex)
    direction = np.asarray(direction, dtype=complex)
    poly = _restriction(P, base, direction).trim()
    if poly.degree() < 1:
        return []
    points = []
    for t in poly.roots():
        z = _refine(P, base + t * direction)
        if np.all(np.isfinite(z)) and abs(evaluate(P, z)) <= ROOT_TOL:
            points.append(z)
    return points


def weighted_normalize(q: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Move z along the weighted action s·z = (s^q_i z_i) to Σ|s^q_i z_i|² = 1."""
    r2 = np.abs(z) ** 2
    if not np.all(q > 0) or not np.any(r2 > 0):
        return z

    def excess(log_s: float) -> float:
        return float(np.sum(np.exp(2 * q * log_s) * r2) - 1.0)

    lo, hi = -1.0, 1.0
    while excess(lo) > 0:
        lo *= 2
    while excess(hi) < 0:
        hi *= 2
    log_s = brentq(excess, lo, hi, xtol=1e-14)
    return np.exp(q * log_s) * z


def fibration_sample(P: InvertiblePolynomial, m: int, seed: int) -> list[FiberPoint]:
    """m points of {W = 0}, normalized by the weighted action, with ρ_i = |ψ_i|².

    Random complex lines are scanned; each contributes its roots until m
    points are collected or ``m * ROOT_RETRIES`` lines have been tried.
    """
    if m < 1:
        raise ParamOutOfRange(f"Sample count must be positive, got {m}")
    q = np.array([float(c) for c in weights(P).q])
    gen = rng(seed, 5, *(e for row in P.exponents for e in row))
    points: list[FiberPoint] = []
    for attempt in range(m * ROOT_RETRIES):
        base = gen.normal(size=P.n) + 1j * gen.normal(size=P.n)
        direction = gen.normal(size=P.n) + 1j * gen.normal(size=P.n)
        for z in line_roots(P, base, direction):
            z = _refine(P, weighted_normalize(q, z))
            if abs(evaluate(P, z)) <= ROOT_TOL:
                points.append(FiberPoint(tuple(complex(c) for c in z)))
            if len(points) == m:
                logger.debug(f"{P}: {m} fiber points from {attempt + 1} lines")
                return points
    raise RootFindFailure(
        f"{P}: only {len(points)} of {m} points after {m * ROOT_RETRIES} lines"
    )

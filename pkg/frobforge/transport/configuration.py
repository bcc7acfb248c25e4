"""Optimal matchings between configurations of distinct points."""

import itertools
import logging

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist, pdist

from frobforge.transport.models.plan import Matching
from frobforge.utils.constants import BRUTE_FORCE_MAX
from frobforge.utils.errors import DiagonalViolation, ParamOutOfRange, SizeMismatch

logger = logging.getLogger(__name__)


def _configuration(points: np.ndarray, name: str) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] > 1 and float(pdist(pts).min()) == 0.0:
        raise DiagonalViolation(f"Configuration {name} has coincident points")
    return pts


def _cost_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    A, B = _configuration(a, "a"), _configuration(b, "b")
    if A.shape[0] != B.shape[0]:
        raise SizeMismatch(f"Configurations have {A.shape[0]} and {B.shape[0]} points")
    if A.shape[0] == 0:
        raise SizeMismatch("Configurations are empty")
    if A.shape[1] != B.shape[1]:
        raise SizeMismatch(f"Points are {A.shape[1]}-D and {B.shape[1]}-D")
    return cdist(A, B, "sqeuclidean")


def _matching(C: np.ndarray, perm: np.ndarray) -> Matching:
    cost = float(C[np.arange(C.shape[0]), perm].sum())
    return Matching(tuple(int(j) for j in perm), cost)


def config_transport(a: np.ndarray, b: np.ndarray) -> Matching:
    """Perfect matching of minimal total squared distance (assignment problem)."""
    C = _cost_matrix(a, b)
    rows, cols = linear_sum_assignment(C)
    perm = cols[np.argsort(rows)]
    match = _matching(C, perm)
    logger.debug(f"Matched {C.shape[0]} points with cost {match.cost:.6e}")
    return match


def brute_force_matching(a: np.ndarray, b: np.ndarray) -> Matching:
    """Cheapest matching by enumerating every permutation."""
    C = _cost_matrix(a, b)
    m = C.shape[0]
    if m > BRUTE_FORCE_MAX:
        raise ParamOutOfRange(f"Brute force is limited to {BRUTE_FORCE_MAX} points, got {m}")
    best = min(itertools.permutations(range(m)), key=lambda p: C[np.arange(m), p].sum())
    return _matching(C, np.asarray(best))


def config_path(
    a: np.ndarray, b: np.ndarray, t: float, matching: Matching | None = None
) -> np.ndarray:
    """Configuration at time t on the straight path a_i -> b_σ(i) of the optimal matching."""
    if not 0.0 <= t <= 1.0:
        raise ParamOutOfRange(f"Path time must lie in [0, 1], got {t}")
    match = matching or config_transport(a, b)
    A = _configuration(a, "a")
    B = _configuration(b, "b")[list(match.permutation)]
    return (1 - t) * A + t * B

"""Transport between the density images of a polynomial and its transpose."""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd

from frobforge.bhk.groups import transpose_mirror
from frobforge.bhk.models.polynomial import InvertiblePolynomial
from frobforge.kvn.fibration import fibration_sample
from frobforge.kvn.models.wave import FiberPoint
from frobforge.transport.brenier import Method, brenier_discrete, plan_interpolate
from frobforge.transport.models.plan import EmpiricalMeasure, TransportPlan
from frobforge.utils.constants import HISTOGRAM_BINS, INTERPOLATION_TIMES
from frobforge.utils.errors import ParamOutOfRange

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 100


@dataclass(frozen=True, eq=False)
class MirrorDemo:
    """Plan between the histogrammed ρ-images of {W = 0} and {Wᵀ = 0}."""

    polynomial: InvertiblePolynomial
    transpose: InvertiblePolynomial
    seed: int
    samples: int
    plan: TransportPlan
    path: pd.DataFrame

    @property
    def cost(self) -> float:
        """Σ π_ij |x_i - y_j|²."""
        return self.plan.cost

    @property
    def marginal_error(self) -> float:
        """Largest marginal deviation of the plan."""
        return self.plan.marginal_error()

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "polynomial": str(self.polynomial),
            "transpose": str(self.transpose),
            "seed": self.seed,
            "samples": self.samples,
            "cost": self.cost,
            "marginalError": self.marginal_error,
            "sourceAtoms": len(self.plan.source),
            "targetAtoms": len(self.plan.target),
            "path": self.path.to_dict(orient="list"),
        }


def histogram_measure(points: list[FiberPoint], bins: int = HISTOGRAM_BINS) -> EmpiricalMeasure:
    """Empirical measure on the occupied bin centres of [0, 1]ⁿ, weighted by sample fraction."""
    if not points:
        raise ParamOutOfRange("Cannot histogram an empty sample")
    rho = np.array([p.rho for p in points])
    n = rho.shape[1]
    counts, edges = np.histogramdd(rho, bins=bins, range=[(0.0, 1.0)] * n)
    occupied = np.argwhere(counts > 0)
    centres = np.column_stack(
        [(edges[k][occupied[:, k]] + edges[k][occupied[:, k] + 1]) / 2 for k in range(n)]
    )
    masses = counts[tuple(occupied.T)] / len(points)
    return EmpiricalMeasure(centres, masses)


def interpolation_path(plan: TransportPlan, times: tuple[float, ...]) -> pd.DataFrame:
    """Mean, spread and distance travelled of the interpolant at each time."""
    rows = []
    source_mean = plan.source.mean()
    for t in times:
        mu_t = plan_interpolate(plan, t)
        mean = mu_t.mean()
        spread = float(np.sum(mu_t.masses * np.sum((mu_t.points - mean) ** 2, axis=1)))
        row: dict[str, float] = {"t": t, "atoms": len(mu_t), "spread": spread}
        row.update({f"mean_rho{k + 1}": float(c) for k, c in enumerate(mean)})
        row["mean_shift"] = float(np.linalg.norm(mean - source_mean))
        row["cost_to_here"] = t**2 * plan.cost
        rows.append(row)
    return pd.DataFrame(rows)


def mirror_transport_demo(
    P: InvertiblePolynomial,
    seed: int,
    samples: int = DEFAULT_SAMPLES,
    bins: int = HISTOGRAM_BINS,
    method: Method = "exact-lp",
) -> MirrorDemo:
    """Sample both hypersurfaces with the same seed and couple their density histograms."""
    PT = transpose_mirror(P)
    source = histogram_measure(fibration_sample(P, samples, seed), bins)
    target = histogram_measure(fibration_sample(PT, samples, seed), bins)
    result = brenier_discrete(source, target, method=method)
    path = interpolation_path(result.plan, INTERPOLATION_TIMES)
    logger.info(
        f"{P} -> {PT}: cost {result.cost:.3e}, {len(source)} x {len(target)} atoms, "
        f"marginal error {result.plan.marginal_error():.1e}"
    )
    return MirrorDemo(P, PT, seed, samples, result.plan, path)

"""Verification suite for the Hessian tensor pipeline."""

import logging
from collections.abc import Callable

import numpy as np

from frobforge.cones.models.cone_point import GroundField, coords_from_matrix
from frobforge.hessian import families
from frobforge.hessian.models.fields import PotentialField, VectorField
from frobforge.hessian.pipeline import (
    curvature_direct,
    curvature_from_A,
    eval_amplitude,
    eval_metric,
    frobenius_pairing_residual,
    levi_civita_curvature,
    wdvv_residual,
)
from frobforge.hessian.residuals import (
    affine_field_check,
    codazzi_dual_residual,
    codazzi_residual,
    euler_conformal_residual,
    fit_euler_beta,
    identity_field_residual,
)
from frobforge.utils.config import RunConfig
from frobforge.utils.constants import FLAT_TOL, WDVV_TOL
from frobforge.utils.reporting import Report
from frobforge.utils.sampling import rng
from frobforge.utils.suite import Suite

logger = logging.getLogger(__name__)

KINK_THRESHOLD = 1e-2
NON_AFFINE_THRESHOLD = 0.1


def random_spd_coords(n: int, gen: np.random.Generator) -> np.ndarray:
    """Chart coordinates of a well-conditioned random SPD matrix."""
    B = gen.normal(size=(n, n))
    return coords_from_matrix(B @ B.T / n + 0.5 * np.eye(n), n, GroundField.R)


def relative_gap(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - b| / max(1, max |b|)."""
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


class HessianSuite(Suite):
    """Oracle, structural and Frobenius checks on the built-in potentials."""

    name = "hessian"

    def __init__(self, cfg: RunConfig, extra: tuple[PotentialField, ...] = ()) -> None:
        super().__init__(cfg)
        self.samples = 5 if cfg.smoke else cfg.samples
        self.extra = extra
        self.log_det = families.log_det(2, "R")
        self.curved = [self.log_det, families.exp_quadratic(3), families.lorentz(2)]

    def _points(self, p: PotentialField, count: int) -> list[np.ndarray]:
        points = []
        for k in range(count):
            gen = rng(self.cfg.seed, 1, k)
            if p is self.log_det:
                points.append(random_spd_coords(2, gen))
            elif p.name.startswith("lorentz"):
                x = gen.uniform(-0.5, 0.5, p.dim - 1)
                points.append(np.array([1.0 + float(np.linalg.norm(x)), *x]))
            else:
                points.append(gen.uniform(-0.8, 0.8, p.dim))
        return points

    def checks(self) -> list[Callable[[], None]]:
        """Check methods in execution order."""
        return [
            self.oracle_agreement,
            self.structural_identities,
            self.flatness_equivalence,
            self.curvature_oracle,
            self.codazzi,
            self.vector_fields,
        ]

    def oracle_agreement(self) -> None:
        """Analytic derivatives against nested central differences."""
        worst = 0.0
        count = 0
        for p in self.curved:
            fd = p.finite_difference(keep=1)
            for x in self._points(p, 5 * self.samples):
                for order in (2, 3):
                    gap = relative_gap(p.derivative(x, order), fd.derivative(x, order))
                    worst = max(worst, gap)
                    count += 1
        self.check("analytic_vs_fd", worst, "oracle", count)

    def structural_identities(self) -> None:
        """Pairing identity and the Codazzi-dual form of WDVV."""
        pairing = dual_gap = 0.0
        count = 0
        for p in self.curved:
            for x in self._points(p, self.samples):
                g, A = eval_metric(p, x), eval_amplitude(p, x)
                pairing = max(pairing, frobenius_pairing_residual(g, A))
                gap = abs(codazzi_dual_residual(g, A) - wdvv_residual(g, A).norm())
                dual_gap = max(dual_gap, gap)
                count += 1
        self.check("frobenius_pairing", pairing, "structural", count)
        self.check("codazzi_dual_equals_wdvv", dual_gap, "structural", count)

    def flatness_equivalence(self) -> None:
        """Vanishing curvature and vanishing WDVV residual agree on every test potential."""
        potentials = [
            families.quadratic(3),
            families.neg_log(3),
            families.diagonal_log_det(3),
            *self.curved,
            *self.extra,
        ]
        mismatches = 0
        count = 0
        for p in potentials:
            for x in self._points(p, self.samples):
                if p.name.startswith(("neg_log", "diagonal_log_det")):
                    x = np.abs(x) + 0.2
                if not p.contains(x):
                    continue
                g, A = eval_metric(p, x), eval_amplitude(p, x)
                curvature = curvature_from_A(g, A).norm()
                wdvv = wdvv_residual(g, A).norm()
                flat, associative = curvature < FLAT_TOL, wdvv < WDVV_TOL
                mismatches += flat != associative
                count += 1
                self.row("flatness", potential=p.name, curvature=curvature, wdvv=wdvv)
        self.flag("wdvv_iff_flat", mismatches == 0, count, f"{mismatches} mismatches")

    def curvature_oracle(self) -> None:
        """Amplitude curvature against the Christoffel-symbol curvature."""
        worst = 0.0
        points = self._points(self.log_det, self.samples)
        for x in points:
            g, A = eval_metric(self.log_det, x), eval_amplitude(self.log_det, x)
            direct = curvature_direct(self.log_det, x).entries
            worst = max(worst, relative_gap(levi_civita_curvature(g, A).entries, direct))
        self.check("curvature_from_A_vs_direct", worst, "oracle", len(points))

    def codazzi(self) -> None:
        """Mixed partials commute for smooth potentials and visibly fail across a kink."""
        worst = 0.0
        for x in self._points(self.log_det, self.samples):
            worst = max(worst, codazzi_residual(self.log_det, x, 3))
        self.check("codazzi_analytic", worst, "oracle", self.samples)
        kink = codazzi_residual(families.kink(), np.array([1e-4, 1.0]), 3)
        self.flag("codazzi_kink_flagged", kink > KINK_THRESHOLD, detail=f"residual {kink:.3e}")

    def vector_fields(self) -> None:
        """Affine, Euler and identity-field checks on the log-det potential."""
        points = self._points(self.log_det, self.samples)
        radial = VectorField.radial(3)
        self.flag("radial_is_affine", affine_field_check(radial, points), len(points))
        square = VectorField(3, lambda x: np.array([x[0] ** 2, 0.0, 0.0]), name="square")
        self.flag("square_not_affine", not affine_field_check(square, points), len(points))

        betas, worst = [], 0.0
        for x in points:
            beta, residual = fit_euler_beta(radial, self.log_det, x)
            betas.append(beta)
            worst = max(worst, residual)
        beta = float(np.mean(betas))
        self.report.payload["euler_beta"] = beta
        self.check("euler_radial", worst, "oracle", len(points), f"fitted beta {beta:.6f}")

        neg_log = families.neg_log(2)
        quad = VectorField(2, lambda x: np.array([x[0] ** 2, 0.0]), name="square")
        defect = euler_conformal_residual(quad, neg_log, 0.0, np.array([1.0, 1.0]))
        self.flag("euler_non_affine_flagged", defect > NON_AFFINE_THRESHOLD, detail=f"{defect:.3e}")

        unit = VectorField.radial(3, -0.5).renamed("identity")
        residual = max(identity_field_residual(self.log_det, unit, x) for x in points)
        self.check("identity_field", residual, "structural", len(points))


def run(cfg: RunConfig, extra: tuple[PotentialField, ...] = ()) -> Report:
    """Run the suite, adding ``extra`` potentials to the flatness check."""
    return HessianSuite(cfg, extra).run()

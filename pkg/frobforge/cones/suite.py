"""Verification suite for the symmetric cone models."""

import logging
from collections.abc import Callable

import numpy as np

from frobforge.cones.geometry import (
    cone_curvature,
    cone_metric,
    cone_potential_field,
    curvature_bracket_check,
    geodesic,
    geodesic_rk4,
    plane_curvature,
    sectional_curvature,
)
from frobforge.cones.jordan import jordan_product, lie_triple_check, trace_form
from frobforge.cones.lorentz import lorentz_metric, lorentz_potential
from frobforge.cones.models.cone_point import (
    ConePoint,
    GroundField,
    LorentzPoint,
    QuaternionMatrix,
    TangentVector,
    chart_basis,
    realify_complex,
)
from frobforge.cones.verifier import flat_locus_verify, full_chart_wdvv, gauss_equation_check
from frobforge.utils.config import RunConfig
from frobforge.utils.constants import JORDAN_TRIPLES, RANDOM_PLANES
from frobforge.utils.errors import NotInCone
from frobforge.utils.reporting import Report
from frobforge.utils.sampling import rng
from frobforge.utils.suite import Suite

logger = logging.getLogger(__name__)

OFF_LOCUS_THRESHOLD = 1e-3
STRICTLY_NEGATIVE = -1e-6


def random_cone_point(n: int, field: GroundField, gen: np.random.Generator) -> ConePoint:
    """Well-conditioned random point of P_n(field)."""
    d = field.chart_dim(n)
    B = np.einsum("a,aij->ij", gen.normal(size=d), chart_basis(n, field))
    M = B @ B.conj().T / field.embed_size(n) + 0.5 * np.eye(field.embed_size(n))
    return ConePoint.from_matrix(field, n, M)


def random_tangent(n: int, field: GroundField, gen: np.random.Generator) -> TangentVector:
    """Random Hermitian matrix with standard normal chart coordinates."""
    return TangentVector.from_coords(field, n, gen.normal(size=field.chart_dim(n)))


def unit_matrix(n: int, entries: dict[tuple[int, int], float]) -> TangentVector:
    """Real symmetric tangent vector from a sparse entry map (mirrored)."""
    M = np.zeros((n, n))
    for (i, j), value in entries.items():
        M[i, j] = M[j, i] = value
    return TangentVector(GroundField.R, n, M)


def random_quaternion_matrix(n: int, gen: np.random.Generator) -> QuaternionMatrix:
    """Quaternion matrix with standard normal components."""
    return QuaternionMatrix(*(gen.normal(size=(n, n)) for _ in range(4)))


def random_complex_matrix(n: int, gen: np.random.Generator) -> np.ndarray:
    """Complex matrix with standard normal real and imaginary parts."""
    return gen.normal(size=(n, n)) + 1j * gen.normal(size=(n, n))


class ConeSuite(Suite):
    """Oracle, curvature, Jordan and flat-locus checks on P_n(R), P_n(C), P_n(H) and Λ_n."""

    name = "cone"

    def __init__(
        self, cfg: RunConfig, fields: tuple[GroundField, ...] | None = None, n: int = 2
    ) -> None:
        super().__init__(cfg)
        self.fields = fields or tuple(GroundField)
        self.n = n
        self.samples = 3 if cfg.smoke else cfg.samples

    def _gen(self, *stream: int) -> np.random.Generator:
        return rng(self.cfg.seed, 2, *stream)

    def checks(self) -> list[Callable[[], None]]:
        """Check methods in execution order."""
        return [
            self.analytic_oracle,
            self.positivity,
            self.geodesics,
            self.sectional,
            self.brackets,
            self.jordan,
            self.embedding,
            self.flat_locus,
            self.gauss,
            self.lorentz,
        ]

    def analytic_oracle(self) -> None:
        """Analytic metric and amplitude against differences of lower-order jets."""
        for index, field in enumerate(self.fields):
            p = cone_potential_field(self.n, field)
            worst = 0.0
            for k in range(self.samples):
                x = random_cone_point(self.n, field, self._gen(index, k)).coords
                for order in (2, 3):
                    exact = p.derivative(x, order)
                    approx = p.finite_difference(keep=order - 1).derivative(x, order)
                    scale = max(1.0, float(np.max(np.abs(exact))))
                    gap = np.max(np.abs(exact - approx)) / scale
                    worst = max(worst, float(gap))
            self.check(f"analytic_vs_fd[{field.value}{self.n}]", worst, "oracle", self.samples)

    def positivity(self) -> None:
        """Metric is positive definite inside and indefinite matrices are rejected."""
        smallest = np.inf
        for field in self.fields:
            for k in range(self.samples):
                X = random_cone_point(self.n, field, self._gen(10, k))
                smallest = min(smallest, float(cone_metric(X).eigenvalues[0]))
        detail = f"min eigenvalue {smallest:.3e}"
        self.flag("metric_positive_definite", smallest > 0, detail=detail)
        try:
            ConePoint(GroundField.R, 2, np.diag([1.0, -1.0]))
        except NotInCone:
            rejected = True
        else:
            rejected = False
        self.flag("indefinite_rejected", rejected)

    def geodesics(self) -> None:
        """Closed-form geodesic against RK4 integration of X'' = X' X⁻¹ X'."""
        X = ConePoint.identity(GroundField.R, 2)
        U = unit_matrix(2, {(0, 1): 1.0})
        gap = float(np.max(np.abs(geodesic(X, U, 0.5).matrix - geodesic_rk4(X, U, 0.5))))
        self.check("geodesic_vs_rk4", gap, "geodesic_rk4")
        worst = 0.0
        for field in self.fields:
            gen = self._gen(20, len(field.value), ord(field.value))
            Y = random_cone_point(self.n, field, gen)
            V = random_tangent(self.n, field, gen) * 0.3
            gap = float(np.max(np.abs(geodesic(Y, V, 0.7).matrix - geodesic_rk4(Y, V, 0.7))))
            worst = max(worst, gap)
        self.check("geodesic_vs_rk4_random", worst, "geodesic_rk4", len(self.fields))

    def sectional(self) -> None:
        """Sectional curvature is non-positive and vanishes on commuting diagonal planes."""
        bases, per_base = (2, 5) if self.cfg.smoke else (10, RANDOM_PLANES // 10)
        sizes = (2, 3) if self.cfg.smoke else (2, 3, 4)
        for index, field in enumerate(self.fields):
            for n in sizes:
                curvatures = []
                for b in range(bases):
                    gen = self._gen(30, index, n, b)
                    X = random_cone_point(n, field, gen)
                    g, Rm = cone_curvature(X)
                    for _ in range(per_base):
                        u, v = random_tangent(n, field, gen), random_tangent(n, field, gen)
                        curvatures.append(plane_curvature(g, Rm, u.coords, v.coords))
                planes = len(curvatures)
                label = f"{field.value}{n}"
                worst, least = max(curvatures), min(curvatures)
                self.row("sectional", cone=label, planes=planes, max=worst, min=least)
                self.check(f"sectional_non_positive[{label}]", max(0.0, worst), "sectional", planes)
                detail = f"min K = {least:.3e}"
                self.flag(f"sectional_negative[{label}]", least < STRICTLY_NEGATIVE, planes, detail)

        I = ConePoint.identity(GroundField.R, 2)
        E11 = unit_matrix(2, {(0, 0): 1.0})
        flat = sectional_curvature(I, E11, unit_matrix(2, {(1, 1): 1.0}))
        self.check("sectional_diagonal_zero", abs(flat), "sectional")
        curved = sectional_curvature(I, E11, unit_matrix(2, {(0, 1): 1.0}))
        self.report.payload["sectional_E11_E12"] = curved
        detail = f"K = {curved:.6f}"
        self.flag("sectional_off_diagonal_negative", curved < STRICTLY_NEGATIVE, detail=detail)

    def brackets(self) -> None:
        """Curvature at the identity is a multiple of the double bracket; Lie triple systems."""
        E11 = unit_matrix(2, {(0, 0): 1.0})
        E22 = unit_matrix(2, {(1, 1): 1.0})
        S12 = unit_matrix(2, {(0, 1): 1.0})
        fit = curvature_bracket_check(E11, S12, [E11, S12, E22])
        self.report.payload["bracket_scale"] = fit.scale
        self.check("bracket_fit", fit.residual, "bracket", 3, f"c = {fit.scale:.6f}")
        commuting = curvature_bracket_check(E11, E22, [E11, S12, E22])
        self.check("bracket_commuting", commuting.residual, "bracket", 3)

        diagonal = [unit_matrix(3, {(i, i): 1.0}) for i in range(3)]
        full = [TangentVector(GroundField.R, 3, B.real) for B in chart_basis(3, GroundField.R)]
        self.flag("lie_triple_diagonal", lie_triple_check(diagonal))
        self.flag("lie_triple_full", lie_triple_check(full))
        self.flag("lie_triple_pair_rejected", not lie_triple_check([E11, S12]))

    def jordan(self) -> None:
        """Trace form associativity of the Jordan product on each field."""
        triples = 20 if self.cfg.smoke else JORDAN_TRIPLES
        for index, field in enumerate(self.fields):
            worst = 0.0
            for k in range(triples):
                gen = self._gen(40, index, k)
                U, V, W = (random_tangent(3, field, gen) for _ in range(3))
                left = trace_form(jordan_product(U, V), W)
                right = trace_form(U, jordan_product(V, W))
                worst = max(worst, abs(left - right))
            self.check(f"jordan_trace_associative[{field.value}]", worst, "jordan", triples)

    def embedding(self) -> None:
        """Quaternion and complex realifications respect products and adjoints."""
        pairs = 20 if self.cfg.smoke else 200
        worst = real_worst = 0.0
        for k in range(pairs):
            gen = self._gen(50, k)
            P, Q = random_quaternion_matrix(3, gen), random_quaternion_matrix(3, gen)
            product = np.max(np.abs((P @ Q).embed() - P.embed() @ Q.embed()))
            adjoint = np.max(np.abs(P.adjoint().embed() - P.embed().conj().T))
            worst = max(worst, float(product), float(adjoint))
            A, B = random_complex_matrix(3, gen), random_complex_matrix(3, gen)
            RA, RB = realify_complex(A), realify_complex(B)
            product = np.max(np.abs(realify_complex(A @ B) - RA @ RB))
            adjoint = np.max(np.abs(realify_complex(A.conj().T) - RA.T))
            real_worst = max(real_worst, float(product), float(adjoint))
        self.check("quaternion_embedding", worst, "embedding", pairs)
        self.check("complex_realification", real_worst, "embedding", pairs)

    def flat_locus(self) -> None:
        """Diagonal torus is flat, associative and totally geodesic; the full chart is not."""
        cases = [(n, f) for f in (GroundField.R, GroundField.C) for n in (2, 3, 4)]
        cases = [(n, f) for n, f in cases if f in self.fields]
        if GroundField.H in self.fields:
            cases.append((2, GroundField.H))
        for n, field in cases:
            sub = flat_locus_verify(
                n,
                field,
                samples=self.samples,
                seed=self.cfg.seed,
                tol=self.cfg.tol("flat"),
                geodesy_tol=self.cfg.tol("geodesy"),
            )
            for check in sub.checks:
                check.name = f"{check.name}[{field.value}{n}]"
                self.report.add(check)
        X = ConePoint(GroundField.C, 2, np.array([[2.0, 0.5 + 0.5j], [0.5 - 0.5j, 1.0]]))
        off = full_chart_wdvv(X)
        self.report.payload["off_locus_wdvv"] = off
        self.flag("off_locus_not_flat", off > OFF_LOCUS_THRESHOLD, detail=f"{off:.3e}")

    def gauss(self) -> None:
        """Gauss equation on the diagonal loci and on span{E11, E12 + E21}."""
        samples = 2 if self.cfg.smoke else 5
        for n in (2, 3):
            sub = gauss_equation_check(
                n, GroundField.R, samples=samples, seed=self.cfg.seed, tol=self.cfg.tol("gauss")
            )
            for check in sub.checks:
                check.name = f"{check.name}[diagonal R{n}]"
                self.report.add(check)
        basis = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
        sub = gauss_equation_check(
            2, GroundField.R, basis, samples=samples, seed=self.cfg.seed, tol=self.cfg.tol("gauss")
        )
        for check in sub.checks:
            check.name = f"{check.name}[E11, E12+E21]"
            self.report.add(check)

    def lorentz(self) -> None:
        """Lorentz potential: positive-definite metric and blow-up at the boundary."""
        points = 50
        smallest = np.inf
        for k in range(points):
            gen = self._gen(60, k)
            x = gen.uniform(-1.0, 1.0, 2)
            p = LorentzPoint(float(np.linalg.norm(x)) + gen.uniform(0.05, 1.0), tuple(x))
            smallest = min(smallest, float(lorentz_metric(p).eigenvalues[0]))
        detail = f"min eigenvalue {smallest:.3e}"
        self.flag("lorentz_metric_positive_definite", smallest > 0, points, detail)
        gaps = np.logspace(-1, -8, 8)
        values = [lorentz_potential(LorentzPoint(1.0 + eps, (1.0, 0.0))) for eps in gaps]
        self.flag("lorentz_boundary_blow_up", bool(np.all(np.diff(values) > 0)), len(values))


def run(cfg: RunConfig, fields: tuple[GroundField, ...] | None = None, n: int = 2) -> Report:
    """Run the suite on the given fields and matrix size."""
    return ConeSuite(cfg, fields, n).run()

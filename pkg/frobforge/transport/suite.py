"""Verification suite for the Monge-Ampere solver and discrete transport."""

import logging
from collections.abc import Callable

import numpy as np

from frobforge.transport.brenier import (
    brenier_discrete,
    displacement_interpolate,
    gaussian_linear_map,
    is_monotone_1d,
    legendre_dual,
    linear_map_fit,
    ma_transport_residual,
    map_rms_error,
    pushforward,
)
from frobforge.transport.configuration import brute_force_matching, config_path, config_transport
from frobforge.transport.models.grid import ConvexPotentialGrid, Grid2D, GridDensity
from frobforge.transport.models.plan import EmpiricalMeasure
from frobforge.transport.monge_ampere import (
    convergence_order,
    exponential_solution,
    ma_residual_norm,
    ma_solve,
    max_error,
    quadratic_solution,
)
from frobforge.utils.config import RunConfig
from frobforge.utils.constants import BRUTE_FORCE_MAX, CONVERGENCE_RATIO
from frobforge.utils.errors import NonPositiveRHS
from frobforge.utils.reporting import Report
from frobforge.utils.sampling import rng
from frobforge.utils.suite import Suite

logger = logging.getLogger(__name__)

SHIFT = (0.5, 0.25)
ANISOTROPIC_COV = (1.0, 0.25)
ANISOTROPIC_SPACING = 0.15
PERTURBATIONS = (1e-3, 1e-2, 1e-1)


def random_atoms(count: int, gen: np.random.Generator, extent: float = 4.0) -> EmpiricalMeasure:
    """Uniform atoms in [0, extent]² with Dirichlet masses summing to 1."""
    return EmpiricalMeasure(gen.uniform(0.0, extent, (count, 2)), gen.dirichlet(np.ones(count)))


def anisotropic_pair(spacing: float = ANISOTROPIC_SPACING) -> tuple[GridDensity, GridDensity]:
    """Centered Gaussians with covariances diag(1, 1/4) and diag(1/4, 1), each cut at 3σ.

    The source grid is twice as coarse as the target grid, so x -> x/2 sends
    source columns onto target columns.
    """
    cx, cy = ANISOTROPIC_COV
    sx, sy = 3 * np.sqrt(cx), 3 * np.sqrt(cy)
    source = Grid2D(
        round(2 * sx / (2 * spacing)), round(2 * sy / (2 * spacing)), (-sx, sx, -sy, sy)
    )
    target = Grid2D(round(2 * sy / spacing), round(2 * sx / spacing), (-sy, sy, -sx, sx))
    mu = GridDensity.gaussian(source, (0.0, 0.0), (cx, cy)).normalized()
    nu = GridDensity.gaussian(target, (0.0, 0.0), (cy, cx)).normalized()
    return mu, nu


def shifted_quadratic(X: np.ndarray, Y: np.ndarray, s: np.ndarray) -> np.ndarray:
    """|x|²/2 + s·x, whose gradient is the translation by s."""
    return 0.5 * (X**2 + Y**2) + s[0] * X + s[1] * Y


def translation(shift: tuple[float, float]) -> Callable[[np.ndarray], np.ndarray]:
    """Point map x -> x + shift."""
    b = np.asarray(shift, dtype=float)
    return lambda pts: np.asarray(pts, dtype=float) + b


class TransportSuite(Suite):
    """Monge-Ampere accuracy, Brenier couplings, pushforwards and configuration matchings.

    The command line runs the solver checks as ``ma`` and the coupling checks as ``ot``.
    """

    name = "transport"

    def __init__(self, cfg: RunConfig) -> None:
        super().__init__(cfg)
        self.grid_size = 16 if cfg.smoke else cfg.grid
        self.cases = 5 if cfg.smoke else 50

    def _gen(self, *stream: int) -> np.random.Generator:
        return rng(self.cfg.seed, 3, *stream)

    def checks(self) -> list[Callable[[], None]]:
        """Check methods in execution order."""
        return self.solver_checks() + self.coupling_checks()

    def solver_checks(self) -> list[Callable[[], None]]:
        """Monge-Ampere solves and the Caffarelli relation."""
        return [
            self.ma_quadratic,
            self.ma_manufactured,
            self.ma_preconditions,
            self.caffarelli_residual,
        ]

    def coupling_checks(self) -> list[Callable[[], None]]:
        """Discrete couplings, pushforwards and configuration matchings."""
        return [
            self.brenier_trivial,
            self.lp_vs_sinkhorn,
            self.anisotropic_gaussian,
            self.legendre_duality,
            self.pushforwards,
            self.interpolation,
            self.monotone_1d,
            self.configurations,
        ]

    def ma_quadratic(self) -> None:
        """|x|²/2 with f ≡ 1 is reproduced exactly."""
        grid = Grid2D(self.grid_size // 2, self.grid_size // 2)
        exact, f = quadratic_solution()
        u = ma_solve(f, exact, grid)
        self.check("ma_quadratic_exact", max_error(u, exact), "ma_exact")
        exact_grid = ConvexPotentialGrid(grid, grid.evaluate(exact))
        self.check("ma_residual_quadratic", ma_residual_norm(exact_grid, f), "structural")

    def ma_manufactured(self) -> None:
        """exp(|x|²/2) converges at second order when h is halved."""
        exact, f = exponential_solution()
        sizes = (self.grid_size // 2, self.grid_size)
        errors, steps = [], []
        for n in sizes:
            grid = Grid2D(n, n)
            u = ma_solve(f, exact, grid)
            err = max_error(u, exact)
            errors.append(err)
            steps.append(grid.h)
            fmax = float(np.max(grid.evaluate(f)))
            self.check(f"ma_solver_residual[{n}]", ma_residual_norm(u, f) / fmax, "ma_residual")
            self.row("ma_convergence", n=n, h=grid.h, error=err, iterations=u.iterations)
        fit = convergence_order(errors, steps)
        ratio = fit.ratios[0]
        self.report.payload["ma_order"] = fit.order
        lo, hi = CONVERGENCE_RATIO
        self.flag("ma_convergence_ratio", lo <= ratio <= hi, detail=f"ratio {ratio:.3f}")

    def ma_preconditions(self) -> None:
        """Non-positive data is refused; the residual grows with the perturbation."""
        grid = Grid2D(8, 8)
        exact, f = quadratic_solution()
        bad = grid.evaluate(f)
        bad[4, 4] = -1.0
        try:
            ma_solve(bad, exact, grid)
        except NonPositiveRHS:
            refused = True
        else:
            refused = False
        self.flag("ma_non_positive_rhs_refused", refused)

        grid = Grid2D(self.grid_size, self.grid_size)
        X, Y = grid.mesh
        bump = np.sin(np.pi * X) * np.sin(np.pi * Y)
        base = grid.evaluate(exact)
        norms = [
            ma_residual_norm(ConvexPotentialGrid(grid, base + eps * bump), f)
            for eps in PERTURBATIONS
        ]
        self.flag("ma_residual_monotone", bool(np.all(np.diff(norms) > 0)), len(norms))

    def brenier_trivial(self) -> None:
        """Self-transport costs nothing; a single atom is translated."""
        grid = Grid2D(8, 8, (-2.0, 2.0, -2.0, 2.0))
        mu = GridDensity.gaussian(grid, (0.0, 0.0), (1.0, 1.0)).normalized()
        same = brenier_discrete(mu, mu)
        self.check("brenier_self_cost", same.cost, "structural")
        identity = float(np.max(np.abs(same.map - same.plan.source.points)))
        self.check("brenier_self_identity_map", identity, "structural")

        a, b = np.array([[0.0, 0.0]]), np.array([[1.0, 2.0]])
        single = brenier_discrete(EmpiricalMeasure(a, [0.7]), EmpiricalMeasure(b, [0.7]))
        self.check("brenier_single_atom_cost", abs(single.cost - 5.0 * 0.7), "structural")

    def lp_vs_sinkhorn(self) -> None:
        """Entropic costs approach the exact LP cost on six-atom instances."""
        worst = lp_marginal = sk_marginal = 0.0
        for k in range(self.cases):
            gen = self._gen(10, k)
            mu, nu = random_atoms(6, gen), random_atoms(6, gen)
            lp = brenier_discrete(mu, nu, "exact-lp")
            sk = brenier_discrete(mu, nu, "sinkhorn")
            gap = abs(sk.cost - lp.cost)
            worst = max(worst, gap)
            lp_marginal = max(lp_marginal, lp.plan.marginal_error())
            sk_marginal = max(sk_marginal, sk.plan.marginal_error())
            self.row("lp_vs_sinkhorn", case=k, lp_cost=lp.cost, sinkhorn_cost=sk.cost, gap=gap)
        self.check("lp_vs_sinkhorn_cost", worst, "lp_vs_sinkhorn", self.cases)
        self.check("marginals_lp", lp_marginal, "marginal_lp", self.cases)
        self.check("marginals_sinkhorn", sk_marginal, "marginal_sinkhorn", self.cases)

    def anisotropic_gaussian(self) -> None:
        """diag(1, 1/4) -> diag(1/4, 1) is the linear map diag(1/2, 2), atom by atom."""
        mu, nu = anisotropic_pair()
        result = brenier_discrete(mu, nu)
        A = gaussian_linear_map(np.diag(ANISOTROPIC_COV), np.diag(ANISOTROPIC_COV[::-1]))
        error = map_rms_error(result, lambda x: x @ A.T)
        self.check("anisotropic_linear_map", error, "linear_map_rms")
        fitted, offset = linear_map_fit(result)
        self.row(
            "anisotropic_fit",
            a11=fitted[0, 0],
            a12=fitted[0, 1],
            a21=fitted[1, 0],
            a22=fitted[1, 1],
            c1=offset[0],
            c2=offset[1],
        )

    def legendre_duality(self) -> None:
        """The conjugate of |x|²/2 + s·x is |y - s|²/2 wherever y - s is a node."""
        grid = Grid2D(32, 32, (-4.0, 4.0, -4.0, 4.0))
        s = np.asarray(SHIFT)
        U = ConvexPotentialGrid(grid, grid.evaluate(lambda X, Y: shifted_quadratic(X, Y, s)))
        V = legendre_dual(U)
        X, Y = grid.mesh
        exact = 0.5 * ((X - s[0]) ** 2 + (Y - s[1]) ** 2)
        reachable = grid.contains(X - s[0], Y - s[1])
        gap = float(np.max(np.abs(V - exact)[reachable]))
        self.check("legendre_dual_quadratic", gap, "structural", int(reachable.sum()))
        # U(x) + V(x) >= |x|² holds node by node
        slack = float(np.min(U.u + V - (X**2 + Y**2)))
        self.check("fenchel_young", max(0.0, -slack), "structural", grid.shape[0] * grid.shape[1])

    def caffarelli_residual(self) -> None:
        """det D²U · g(∇U) = f for a Gaussian translated by a fixed shift."""
        n = self.grid_size
        grid = Grid2D(n, n, (-4.0, 4.0, -4.0, 4.0))
        f = GridDensity.gaussian(grid, (0.0, 0.0), (1.0, 1.0))
        g = GridDensity.gaussian(grid, SHIFT, (1.0, 1.0))
        U = grid.evaluate(lambda X, Y: 0.5 * (X**2 + Y**2) + SHIFT[0] * X + SHIFT[1] * Y)
        nodal_g = GridDensity(grid, g.mass)
        residual = ma_transport_residual(U, f, nodal_g)
        self.check(f"ma_transport_residual[{n}]", residual, "caffarelli")

    def pushforwards(self) -> None:
        """Identity and lattice translations; coupling marginals reproduce the target."""
        grid = Grid2D(16, 16, (-3.0, 3.0, -3.0, 3.0))
        mu = GridDensity.gaussian(grid, (0.0, 0.0), (0.5, 0.5)).normalized()
        same = pushforward(lambda pts: pts, mu)
        self.check("pushforward_identity", float(np.max(np.abs(same.mass - mu.mass))), "structural")

        h = grid.h
        moved = pushforward(translation((2 * h, h)), mu)
        expected = np.zeros(grid.shape)
        expected[2:, 1:] = mu.mass[:-2, :-1]
        interior = (slice(2, -2), slice(2, -2))
        shift_gap = float(np.max(np.abs(moved.mass[interior] - expected[interior])))
        self.check("pushforward_lattice_shift", shift_gap, "structural")
        self.check("pushforward_mass", abs(moved.total - mu.total), "mass")

        small = Grid2D(10, 10, (-3.0, 3.0, -3.0, 3.0))
        src = GridDensity.gaussian(small, (-0.5, 0.0), (0.5, 0.5)).normalized()
        dst = GridDensity.gaussian(small, (0.5, 0.5), (0.5, 0.5)).normalized()
        pushed = pushforward(brenier_discrete(src, dst), src)
        gap = float(np.max(np.abs(pushed.node_masses() - dst.node_masses())))
        self.check("pushforward_plan_marginal", gap, "marginal_sinkhorn")

    def interpolation(self) -> None:
        """Displacement interpolation moves the mean linearly and stays consistent."""
        grid = Grid2D(20, 20, (-3.0, 3.0, -3.0, 3.0))
        h = grid.h
        shift = (4 * h, 2 * h)
        mu = GridDensity.gaussian(grid, (0.0, 0.0), (1.0, 1.0)).normalized()
        nu = GridDensity.gaussian(grid, shift, (1.0, 1.0)).normalized()
        T = translation(shift)
        half = displacement_interpolate(mu, T, 0.5)
        midpoint = mu.mean() + 0.5 * np.asarray(shift)
        drift = float(np.max(np.abs(half.mean() - midpoint)))
        self.flag("interpolation_midpoint", drift <= h, detail=f"drift {drift:.3e}")
        self.check("interpolation_mass", abs(half.total - mu.total), "mass")
        start = displacement_interpolate(mu, T, 0.0)
        self.check("interpolation_start", float(np.max(np.abs(start.mass - mu.mass))), "structural")

        rest = brenier_discrete(half, nu)
        remaining = translation((0.5 * shift[0], 0.5 * shift[1]))
        self.check("interpolation_consistency", map_rms_error(rest, remaining), "interpolation")

    def monotone_1d(self) -> None:
        """One-dimensional Brenier maps are nondecreasing."""
        ok = True
        for k in range(self.cases):
            gen = self._gen(20, k)
            a = EmpiricalMeasure(gen.normal(size=40), gen.dirichlet(np.ones(40)))
            b = EmpiricalMeasure(gen.normal(1.0, 2.0, size=30), gen.dirichlet(np.ones(30)))
            ok = ok and is_monotone_1d(brenier_discrete(a, b))
        self.flag("brenier_monotone_1d", ok, self.cases)

    def configurations(self) -> None:
        """Assignment matches brute force; the path joins the two configurations."""
        worst = 0.0
        for k in range(self.cases):
            gen = self._gen(30, k)
            m = 1 + k % BRUTE_FORCE_MAX
            a, b = gen.normal(size=(m, 2)), gen.normal(size=(m, 2))
            fast, slow = config_transport(a, b), brute_force_matching(a, b)
            worst = max(worst, abs(fast.cost - slow.cost))
        self.check("config_vs_brute_force", worst, "structural", self.cases)

        gen = self._gen(31)
        a = gen.normal(size=(5, 2))
        perm = gen.permutation(5)
        match = config_transport(a, a[perm])
        recovered = np.asarray(match.permutation)
        self.flag("config_permutation_recovered", bool(np.all(perm[recovered] == np.arange(5))))
        end = config_path(a, a[perm], 1.0, match)
        self.check("config_path_endpoint", float(np.max(np.abs(end - a))), "structural")


class MongeAmpereSuite(TransportSuite):
    """Solver accuracy, preconditions and the Caffarelli relation."""

    name = "ma"

    def checks(self) -> list[Callable[[], None]]:
        """Check methods in execution order."""
        return self.solver_checks()


class OptimalTransportSuite(TransportSuite):
    """Couplings, pushforwards, interpolation and configuration matchings."""

    name = "ot"

    def checks(self) -> list[Callable[[], None]]:
        """Check methods in execution order."""
        return self.coupling_checks()


def run_ma(cfg: RunConfig) -> Report:
    """Run the Monge-Ampere checks and return their report."""
    return MongeAmpereSuite(cfg).run()


def run_ot(cfg: RunConfig) -> Report:
    """Run the coupling checks and return their report."""
    return OptimalTransportSuite(cfg).run()

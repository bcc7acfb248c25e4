"""Verification suite for Liouville evolution and the density fibration."""

import logging
import math
from collections.abc import Callable

import numpy as np

from frobforge.bhk.parser import parse
from frobforge.kvn.fibration import evaluate, fibration_sample, line_roots
from frobforge.kvn.liouville import (
    center_of_mass,
    density_projection,
    evolution_commutes_with_projection,
    fiber_equivalent,
    liouville_evolve,
    torus_act,
    unitarity_check,
)
from frobforge.kvn.mirror import mirror_transport_demo
from frobforge.kvn.models.wave import Hamiltonian, WaveField
from frobforge.transport.models.grid import Grid2D
from frobforge.utils.config import RunConfig
from frobforge.utils.reporting import Report
from frobforge.utils.sampling import rng
from frobforge.utils.suite import Suite

logger = logging.getLogger(__name__)

PHASE_BOUNDS = (-6.0, 6.0, -6.0, 6.0)
PACKET_CENTER = (1.0, 0.5)
PACKET_WIDTH = 0.75
HARMONIC_TIMES = (0.1, 1.0, 5.0)
FERMAT = "x1^2+x2^2"
QUINTIC = "x1^5+x2^5+x3^5+x4^5+x5^5"
MIRROR_CASES = {"fermat": "x1^3+x2^3", "loop": "x1^3*x2+x2^3*x1"}
CHAIN = "x1^2*x2+x2^2"


def phase_grid(n: int) -> Grid2D:
    """n x n nodes on the square phase-space window."""
    return Grid2D(n, n, PHASE_BOUNDS)


def random_packet(grid: Grid2D, gen: np.random.Generator) -> WaveField:
    """Packet with random centre in [-1.5, 1.5]² and momentum in [-1, 1]²."""
    center = tuple(gen.uniform(-1.5, 1.5, 2))
    momentum = tuple(gen.uniform(-1.0, 1.0, 2))
    return WaveField.gaussian_packet(grid, center, PACKET_WIDTH, momentum)


class KvnSuite(Suite):
    """Torus invariance, unitarity, commutation and fibration sampling."""

    name = "kvn"

    def __init__(self, cfg: RunConfig) -> None:
        super().__init__(cfg)
        self.coarse = phase_grid(64 if cfg.smoke else 128)
        self.fine = phase_grid(256)
        self.pairs = 5 if cfg.smoke else 20
        self.samples = 20 if cfg.smoke else 100

    def _gen(self, *stream: int) -> np.random.Generator:
        return rng(self.cfg.seed, 6, *stream)

    def checks(self) -> list[Callable[[], None]]:
        """Check methods in execution order."""
        return [
            self.projection,
            self.torus_invariance,
            self.hamiltonians,
            self.zero_flow,
            self.harmonic,
            self.pendulum,
            self.commutation,
            self.fermat_line,
            self.quintic_samples,
            self.mirror,
        ]

    def projection(self) -> None:
        """ρ = |ψ|² with total mass ‖ψ‖²."""
        grid = self.coarse
        zero = density_projection(WaveField(grid, np.zeros(grid.shape)))
        self.flag("projection_zero", not np.any(zero.mass))
        constant = density_projection(WaveField(grid, np.full(grid.shape, 0.5 - 0.5j)))
        self.check("projection_constant", float(np.max(np.abs(constant.mass - 0.5))), "structural")
        packet = WaveField.gaussian_packet(grid, PACKET_CENTER, PACKET_WIDTH)
        mass = density_projection(packet).total
        self.check("projection_packet_mass", abs(mass - 1), "structural")

    def torus_invariance(self) -> None:
        """Unit phases, constant or varying, leave the density unchanged."""
        gen = self._gen(1)
        psi = random_packet(self.coarse, gen)
        rho = density_projection(psi).mass
        worst = 0.0
        for theta in (0.0, math.pi / 3, gen.uniform(0, 2 * math.pi, self.coarse.shape)):
            moved = density_projection(torus_act(psi, theta)).mass
            worst = max(worst, float(np.max(np.abs(moved - rho))) / max(1.0, float(rho.max())))
        self.check("torus_density_invariance", worst, "torus", 3)
        self.flag("fiber_equivalent_phase", fiber_equivalent(psi, torus_act(psi, math.pi / 3)))
        doubled = WaveField(psi.grid, 2 * psi.psi)
        self.flag("fiber_inequivalent_scaled", not fiber_equivalent(psi, doubled))

    def hamiltonians(self) -> None:
        """Analytic partials agree with central differences."""
        for H in (Hamiltonian.harmonic(), Hamiltonian.pendulum(), Hamiltonian.zero()):
            gap = H.check_partials(self._gen(2), samples=self.cfg.samples)
            self.check(f"partials[{H.name}]", gap, "partials", self.cfg.samples)

    def zero_flow(self) -> None:
        """H ≡ 0 leaves the field unchanged."""
        psi = random_packet(self.coarse, self._gen(3))
        moved = liouville_evolve(psi, Hamiltonian.zero(), 1.0)
        self.check("zero_flow_unchanged", float(np.max(np.abs(moved.psi - psi.psi))), "structural")

    def harmonic(self) -> None:
        """Exact rotations: full turns return, quarter turns rotate the centre, norms hold."""
        grid = self.coarse
        H = Hamiltonian.harmonic()
        psi = WaveField.gaussian_packet(grid, PACKET_CENTER, PACKET_WIDTH, (0.5, 0.0))
        turned = liouville_evolve(psi, H, 2 * math.pi)
        gap = float(np.max(np.abs(turned.psi - psi.psi)))
        self.check("harmonic_full_turn", gap, "harmonic_return")

        quarter = liouville_evolve(psi, H, math.pi / 2)
        q0, p0 = center_of_mass(psi)
        drift = float(np.max(np.abs(center_of_mass(quarter) - np.array([p0, -q0]))))
        self.flag("harmonic_quarter_turn_center", drift <= grid.h, detail=f"drift {drift:.3e}")

        for t in HARMONIC_TIMES:
            moved = liouville_evolve(psi, H, t)
            self.check(f"harmonic_norm[t={t:g}]", abs(moved.norm2 - psi.norm2), "harmonic")
            mass = liouville_evolve(density_projection(psi), H, t).total
            self.row("harmonic", t=t, norm2=moved.norm2, density_mass=mass)

    def pendulum(self) -> None:
        """Norms and inner products survive the pendulum flow at 256²."""
        H = Hamiltonian.pendulum()
        gen = self._gen(4)
        psi = WaveField.gaussian_packet(self.fine, PACKET_CENTER, PACKET_WIDTH)
        others = [random_packet(self.fine, gen) for _ in range(self.pairs)]
        sub = unitarity_check(
            psi, H, (1.0,), others, self.cfg.tol("pendulum_norm"), self.cfg.tol("inner")
        )
        for check in sub.checks:
            check.seed = self.cfg.seed
            self.report.add(check)

    def commutation(self) -> None:
        """|U_t ψ|² against U_t |ψ|² for the closed form and the pendulum."""
        psi = WaveField.gaussian_packet(self.coarse, PACKET_CENTER, PACKET_WIDTH)
        gap = evolution_commutes_with_projection(psi, Hamiltonian.harmonic(), 1.0)
        self.check("commutation[harmonic]", gap, "commutation")
        fine = WaveField.gaussian_packet(self.fine, PACKET_CENTER, PACKET_WIDTH)
        gap = evolution_commutes_with_projection(fine, Hamiltonian.pendulum(), 0.5)
        self.check("commutation[pendulum]", gap, "commutation")

    def fermat_line(self) -> None:
        """x1² + x2² meets the line (1, t) at t = ±i with ρ = (1, 1)."""
        P = parse(FERMAT)
        roots = line_roots(P, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        found = sorted(complex(z[1]).imag for z in roots)
        ok = len(found) == 2 and np.allclose(found, [-1.0, 1.0], atol=1e-12)
        self.flag("fermat_line_roots", ok, detail=f"roots {found}")
        rho_gap = max(float(np.max(np.abs(np.abs(z) ** 2 - 1.0))) for z in roots)
        self.check("fermat_line_density", rho_gap, "structural")

    def quintic_samples(self) -> None:
        """Sampled points solve W = 0 and have nonnegative densities."""
        P = parse(QUINTIC)
        points = fibration_sample(P, self.samples, self.cfg.seed)
        worst = max(abs(evaluate(P, np.asarray(pt.psi))) for pt in points)
        self.check("quintic_root_residual", worst, "root", len(points))
        self.flag("quintic_density_nonnegative", all(np.all(pt.rho >= 0) for pt in points))
        gen = self._gen(5)
        torus_gap = max(
            float(np.max(np.abs(pt.act(gen.uniform(0, 2 * math.pi, P.n)).rho - pt.rho)))
            for pt in points
        )
        self.check("quintic_torus_density", torus_gap, "torus", len(points))

    def mirror(self) -> None:
        """Self-transpose polynomials couple at zero cost; the chain's plan is exact."""
        samples = max(10, self.samples // 2)
        for label, poly in MIRROR_CASES.items():
            demo = mirror_transport_demo(parse(poly), self.cfg.seed, samples)
            self.check(f"mirror_cost[{label}]", demo.cost, "mirror_cost", samples)
        chain = mirror_transport_demo(parse(CHAIN), self.cfg.seed, samples)
        self.check("mirror_marginals[chain]", chain.marginal_error, "mirror_marginal", samples)
        self.report.payload["mirror_chain"] = chain.to_dict()
        for row in chain.path.to_dict(orient="records"):
            self.row("mirror_path", **row)
        again = mirror_transport_demo(parse(CHAIN), self.cfg.seed, samples)
        self.flag("mirror_deterministic", again.to_dict() == chain.to_dict())


def run(cfg: RunConfig) -> Report:
    """Run the suite and return its report."""
    return KvnSuite(cfg).run()

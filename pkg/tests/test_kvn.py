"""Tests for Liouville evolution, the density projection and fibration sampling."""

import math
from pathlib import Path

import numpy as np
import pytest

from frobforge.bhk.parser import parse
from frobforge.kvn.fibration import evaluate, fibration_sample, line_roots, weighted_normalize
from frobforge.kvn.liouville import (
    backward_characteristics,
    center_of_mass,
    density_projection,
    evolution_commutes_with_projection,
    fiber_equivalent,
    liouville_evolve,
    torus_act,
    unitarity_check,
)
from frobforge.kvn.mirror import histogram_measure, mirror_transport_demo
from frobforge.kvn.models.wave import FiberPoint, Hamiltonian, WaveField
from frobforge.kvn.suite import CHAIN, KvnSuite, phase_grid, random_packet
from frobforge.transport.models.grid import Grid2D
from frobforge.utils.errors import CFLWarning, ParamOutOfRange
from frobforge.utils.sampling import rng
from tests.utils import failed_checks, slow, smoke_config

QUINTIC = "x1^5+x2^5+x3^5+x4^5+x5^5"


@pytest.fixture(scope="module")
def grid() -> Grid2D:
    """128 cells over [-6, 6]²."""
    return phase_grid(128)


@pytest.fixture
def packet(grid: Grid2D) -> WaveField:
    """Packet at (1, 0.5) with a small momentum."""
    return WaveField.gaussian_packet(grid, (1.0, 0.5), 0.75, (0.5, 0.0))


def test_projection_of_constant_field(grid: Grid2D) -> None:
    """|0.5 - 0.5i|² = 0.5 everywhere."""
    psi = WaveField(grid, np.full(grid.shape, 0.5 - 0.5j))
    assert np.allclose(density_projection(psi).mass, 0.5, atol=1e-15)


def test_packet_is_normalized(packet: WaveField) -> None:
    """Density mass equals ‖ψ‖² = 1."""
    assert density_projection(packet).total == pytest.approx(1.0, abs=1e-12)


def test_torus_action_keeps_the_density(packet: WaveField) -> None:
    """Constant and node-dependent phases are invisible in ρ."""
    theta = rng(1).uniform(0, 2 * math.pi, packet.grid.shape)
    assert fiber_equivalent(packet, torus_act(packet, math.pi / 3))
    assert fiber_equivalent(packet, torus_act(packet, theta))
    assert not fiber_equivalent(packet, WaveField(packet.grid, 2 * packet.psi))


def test_zero_hamiltonian_is_the_identity(packet: WaveField) -> None:
    """H ≡ 0 does not move anything."""
    moved = liouville_evolve(packet, Hamiltonian.zero(), 1.0)
    assert np.max(np.abs(moved.psi - packet.psi)) < 1e-10


def test_harmonic_full_turn_returns(packet: WaveField) -> None:
    """The oscillator flow has period 2π."""
    turned = liouville_evolve(packet, Hamiltonian.harmonic(), 2 * math.pi)
    assert np.max(np.abs(turned.psi - packet.psi)) < 1e-9


def test_harmonic_quarter_turn_rotates_the_center(packet: WaveField) -> None:
    """q' = p, p' = -q sends (q, p) to (p, -q) after π/2."""
    quarter = liouville_evolve(packet, Hamiltonian.harmonic(), math.pi / 2)
    q0, p0 = center_of_mass(packet)
    assert np.allclose(center_of_mass(quarter), [p0, -q0], atol=packet.grid.h)


def test_harmonic_rotation_is_unitary(packet: WaveField, grid: Grid2D) -> None:
    """Fourier shears preserve norms and inner products."""
    others = [random_packet(grid, rng(2, k)) for k in range(3)]
    report = unitarity_check(packet, Hamiltonian.harmonic(), (0.1, 1.0, 5.0), others, 1e-12)
    assert report.passed, failed_checks(report)


def test_harmonic_commutes_with_projection(grid: Grid2D) -> None:
    """Evolving ψ then squaring matches evolving ρ for a well-resolved packet."""
    psi = WaveField.gaussian_packet(grid, (0.5, 0.0), 0.6)
    assert evolution_commutes_with_projection(psi, Hamiltonian.harmonic(), 1.0) < 1e-9


def test_density_evolution_keeps_mass(packet: WaveField) -> None:
    """Rotating ρ keeps its total."""
    rho = density_projection(packet)
    assert liouville_evolve(rho, Hamiltonian.harmonic(), 1.0).total == pytest.approx(1.0)


def test_large_steps_are_subdivided() -> None:
    """A step that crosses many cells raises a CFLWarning and still integrates."""
    coarse = phase_grid(32)
    with pytest.warns(CFLWarning):
        Q, P = backward_characteristics(Hamiltonian.pendulum(), coarse, 0.1, dt=1.0)
    assert Q.shape == coarse.shape
    assert np.all(np.isfinite(P))


def test_bad_inputs() -> None:
    """Non-finite times, unknown Hamiltonians and empty packets are refused."""
    coarse = phase_grid(16)
    psi = WaveField.gaussian_packet(coarse, (0.0, 0.0), 1.0)
    with pytest.raises(ParamOutOfRange):
        liouville_evolve(psi, Hamiltonian.harmonic(), math.inf)
    with pytest.raises(ParamOutOfRange):
        Hamiltonian.by_name("duffing")
    with pytest.raises(ParamOutOfRange):
        WaveField.gaussian_packet(coarse, (0.0, 0.0), 0.0)
    with pytest.raises(ParamOutOfRange):
        WaveField(coarse, np.zeros(coarse.shape)).normalized()


@pytest.mark.parametrize("name", ["harmonic", "pendulum", "zero"])
def test_hamiltonian_partials(name: str) -> None:
    """Analytic partials match central differences."""
    assert Hamiltonian.by_name(name).check_partials(rng(3)) < 1e-6


def test_fermat_line_roots() -> None:
    """x1² + x2² meets the line (1, t) at t = ±i."""
    roots = line_roots(parse("x1^2+x2^2"), np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    assert sorted(round(z[1].imag, 12) for z in roots) == [-1.0, 1.0]
    assert all(np.allclose(np.abs(z) ** 2, 1.0) for z in roots)


def test_weighted_normalize() -> None:
    """Equal charges rescale onto the unit sphere."""
    z = weighted_normalize(np.array([0.5, 0.5]), np.array([3.0 + 0j, 4.0 + 0j]))
    assert np.allclose(z, [0.6, 0.8])


def test_quintic_samples() -> None:
    """Samples solve W = 0, have nonnegative ρ summing to one and ignore phases."""
    P = parse(QUINTIC)
    points = fibration_sample(P, 10, seed=5)
    assert len(points) == 10
    for pt in points:
        assert abs(evaluate(P, np.asarray(pt.psi))) <= 1e-10
        assert np.all(pt.rho >= 0)
        assert pt.rho.sum() == pytest.approx(1.0, abs=1e-6)
        assert np.allclose(pt.act(rng(4).uniform(0, 2 * math.pi, 5)).rho, pt.rho)


def test_sampling_is_deterministic() -> None:
    """The same seed gives the same points."""
    P = parse(CHAIN)
    assert fibration_sample(P, 5, seed=9) == fibration_sample(P, 5, seed=9)
    with pytest.raises(ParamOutOfRange):
        fibration_sample(P, 0, seed=9)


def test_histogram_measure() -> None:
    """Points in the same bin merge; masses are sample fractions."""
    points = [FiberPoint((0.1 + 0j, 0.1 + 0j)), FiberPoint((0.1 + 0j, 0.1 + 0j))]
    points.append(FiberPoint((0.9 + 0j, 0.1 + 0j)))
    mu = histogram_measure(points, bins=4)
    assert len(mu) == 2
    assert sorted(mu.masses) == pytest.approx([1 / 3, 2 / 3])
    with pytest.raises(ParamOutOfRange):
        histogram_measure([])


def test_self_transpose_mirror_costs_nothing() -> None:
    """x1³ + x2³ equals its transpose, so matched seeds give identical histograms."""
    demo = mirror_transport_demo(parse("x1^3+x2^3"), seed=1, samples=20)
    assert demo.cost < 1e-6
    assert demo.marginal_error < 1e-7


def test_chain_mirror_demo() -> None:
    """Exact LP marginals and a path ending at the full cost."""
    demo = mirror_transport_demo(parse(CHAIN), seed=2, samples=20)
    assert demo.marginal_error < 1e-7
    assert str(demo.transpose) == "x1^2+x1*x2^2"
    path = demo.path
    assert list(path["t"]) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert path["cost_to_here"].iloc[-1] == pytest.approx(demo.cost)
    assert path["mean_shift"].iloc[0] == pytest.approx(0.0, abs=1e-12)
    assert demo.to_dict()["sourceAtoms"] == len(demo.plan.source)


@slow
def test_suite_smoke(tmp_path: Path) -> None:
    """Every kvn check passes at smoke sizes."""
    report = KvnSuite(smoke_config(tmp_path)).run()
    assert report.passed, failed_checks(report)

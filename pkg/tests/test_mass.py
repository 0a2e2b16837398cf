import numpy as np
import pytest

from wulfflab.energy import RadialPotential
from wulfflab.mass import (
    ball_energy,
    critical_mass,
    energy_curve,
    regime_split,
    unit_ball_potential,
)

QUAD = RadialPotential.quadratic()
LIN = RadialPotential.linear()


def test_unit_ball_potential_closed_forms():
    # int_{B_1} |x|^alpha dx = surface(S^{n-1}) / (n + alpha)
    assert unit_ball_potential(QUAD, 2) == pytest.approx(2 * np.pi / 4, rel=1e-12)
    assert unit_ball_potential(LIN, 2) == pytest.approx(2 * np.pi / 3, rel=1e-12)
    assert unit_ball_potential(QUAD, 3) == pytest.approx(4 * np.pi / 5, rel=1e-12)
    assert unit_ball_potential(LIN, 3) == pytest.approx(np.pi, rel=1e-12)


def test_ball_energy_closed_form():
    # unit disk: perimeter 2 pi plus int |x|^2 = pi / 2
    assert ball_energy(np.pi, 2, QUAD) == pytest.approx(2 * np.pi + np.pi / 2, rel=1e-12)
    # unit 3-ball: area 4 pi plus int |x| = pi
    assert ball_energy(4 * np.pi / 3, 3, LIN) == pytest.approx(4 * np.pi + np.pi, rel=1e-12)


@pytest.mark.parametrize("n,alpha,expected", [
    (2, 1.0, np.pi),
    (2, 2.0, np.pi * 0.5 ** (2 / 3)),
    (3, 1.0, (4 * np.pi / 3) * 2 ** (3 / 2)),
    (3, 2.0, 4 * np.pi / 3),
])
def test_critical_mass_closed_forms(n, alpha, expected):
    g = RadialPotential.power(alpha)
    assert critical_mass(n, g) == pytest.approx(expected, rel=1e-12)


def test_critical_mass_rejects_one_dimension_and_odd_potentials():
    with pytest.raises(ValueError):
        critical_mass(1, QUAD)
    table = RadialPotential.table([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        critical_mass(2, table)


def test_energy_curve_matches_ball_energy_pointwise():
    masses = np.geomspace(0.5, 8.0, 16)
    curve = energy_curve(2, QUAD, masses)
    assert curve.alpha == 2.0
    assert curve.dimension == 2
    for m, e in zip(curve.masses, curve.energies):
        assert e == pytest.approx(ball_energy(m, 2, QUAD), rel=1e-12)


@pytest.mark.parametrize("n,alpha", [(2, 1.0), (2, 2.0), (3, 1.0), (3, 2.0)])
def test_regime_split_crossover_brackets_the_critical_mass(n, alpha):
    g = RadialPotential.power(alpha)
    m_alpha = critical_mass(n, g)
    masses = np.geomspace(m_alpha / 4, m_alpha * 4, 200)
    split = regime_split(energy_curve(n, g, masses), require_crossover=True)
    assert abs(split.crossover - m_alpha) / m_alpha < 1e-3
    assert split.concave[1] == split.crossover == split.convex[0]


def test_regime_split_orders_concave_before_convex():
    g = QUAD
    m_alpha = critical_mass(2, g)
    masses = np.geomspace(m_alpha / 3, m_alpha * 3, 60)
    split = regime_split(energy_curve(2, g, masses))
    lo_c, hi_c = split.concave
    lo_v, hi_v = split.convex
    assert lo_c < hi_c <= lo_v < hi_v


def test_regime_split_requires_a_crossover_when_asked():
    # far below the critical mass the curve stays concave
    g = QUAD
    m_alpha = critical_mass(2, g)
    masses = np.geomspace(m_alpha / 100, m_alpha / 10, 40)
    with pytest.raises(ValueError):
        regime_split(energy_curve(2, g, masses), require_crossover=True)


def test_ball_energy_scale_covariance():
    # |lambda B| = lambda^n m, F scales by lambda^(n-1), G by lambda^(n+alpha)
    rng = np.random.default_rng(0)
    for _ in range(12):
        n = int(rng.integers(2, 4))
        alpha = float(rng.uniform(0.5, 3.0))
        lam = float(rng.uniform(0.4, 2.5))
        m = float(rng.uniform(0.3, 5.0))
        g = RadialPotential.power(alpha)
        omega = {2: np.pi, 3: 4 * np.pi / 3}[n]
        surface = n * omega ** (1 / n) * m ** ((n - 1) / n)
        grav = ball_energy(m, n, g) - surface
        scaled = lam ** (n - 1) * surface + lam ** (n + alpha) * grav
        assert ball_energy(lam**n * m, n, g) == pytest.approx(scaled, rel=1e-11)

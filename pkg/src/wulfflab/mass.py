"""Ball energy as a function of mass and the critical-mass crossover.

For homogeneous potentials the ball's free energy has the closed form
E(m) = c_F m^((n-1)/n) + c_G m^((n+alpha)/n): a concave surface term plus a
convex potential term.  The curve is concave below a critical mass and
convex above it, and the crossover solves E''(m) = 0 in closed form.  The
regime detector reads the same transition off a sampled curve by second
differences, so the closed form and the numerics certify each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .energy import RadialPotential
from .shapes import sphere_surface_measure, unit_ball_volume

__all__ = [
    "EnergyCurve",
    "RegimeSplit",
    "ball_energy",
    "critical_mass",
    "energy_curve",
    "regime_split",
    "unit_ball_potential",
]


def unit_ball_potential(g: RadialPotential, n: int) -> float:
    """int over B_1 of h(|x|) dx = surface(S^{n-1}) int_0^1 h(t) t^(n-1) dt,
    by adaptive quadrature to 1e-10."""
    val, _ = quad(lambda t: float(g(np.array([t]))[0]) * t ** (n - 1), 0.0, 1.0,
                  epsabs=1e-10, epsrel=1e-10)
    return sphere_surface_measure(n) * val


def _require_homogeneous(g: RadialPotential) -> float:
    if g.homogeneity is None or g.homogeneity <= 0:
        raise ValueError("the closed form needs a potential homogeneous of positive degree")
    return g.homogeneity


def ball_energy(m: float, n: int, g: RadialPotential) -> float:
    """E(B_r(m)) = surface(S^{n-1}) |B_1|^{-(n-1)/n} m^{(n-1)/n}
    + |B_1|^{-(alpha+n)/n} (int_{B_1} h) m^{(n+alpha)/n}."""
    alpha = _require_homogeneous(g)
    if m <= 0:
        raise ValueError("mass must be positive")
    omega = unit_ball_volume(n)
    bh = unit_ball_potential(g, n)
    if bh == 0:
        raise ValueError("degenerate potential: int over B_1 of h vanishes")
    surface = sphere_surface_measure(n) * omega ** (-(n - 1) / n) * m ** ((n - 1) / n)
    potential = omega ** (-(alpha + n) / n) * bh * m ** ((n + alpha) / n)
    return surface + potential


def critical_mass(n: int, g: RadialPotential) -> float:
    """m_alpha = |B_1| [ (n-1) surface(S^{n-1})
    / (alpha (alpha+n) int_{B_1} h) ]^{n/(1+alpha)}."""
    alpha = _require_homogeneous(g)
    if n < 2:
        raise ValueError("the crossover formula needs dimension at least 2")
    bh = unit_ball_potential(g, n)
    if bh <= 0:
        raise ValueError("degenerate potential: int over B_1 of h vanishes")
    omega = unit_ball_volume(n)
    ratio = (n - 1) * sphere_surface_measure(n) / (alpha * (alpha + n) * bh)
    return omega * ratio ** (n / (1 + alpha))


@dataclass(frozen=True)
class EnergyCurve:
    masses: np.ndarray
    energies: np.ndarray
    alpha: float
    dimension: int

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        energies = np.asarray(self.energies, dtype=float)
        if masses.ndim != 1 or masses.shape != energies.shape:
            raise ValueError("masses and energies must be matching 1D grids")
        if np.any(masses <= 0) or np.any(np.diff(masses) <= 0):
            raise ValueError("masses must be positive and strictly increasing")
        if np.any(energies <= 0):
            raise ValueError("ball energies are positive")
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "energies", energies)


def energy_curve(n: int, g: RadialPotential, masses) -> EnergyCurve:
    masses = np.sort(np.asarray(masses, dtype=float))
    energies = np.array([ball_energy(m, n, g) for m in masses])
    return EnergyCurve(masses, energies, _require_homogeneous(g), n)


@dataclass(frozen=True)
class RegimeSplit:
    concave: tuple[float, float] | None
    convex: tuple[float, float] | None
    crossover: float | None


def _log_second_difference(curve: EnergyCurve) -> tuple[np.ndarray, np.ndarray]:
    """Sign-equivalent second derivative on the interior of a log-spaced
    grid: with u = log m, E''(m) has the sign of d2E/du2 - dE/du.

    Richardson extrapolation over step doubling removes the leading
    truncation term when the grid is wide enough to difference at 2h.
    """
    u = np.log(curve.masses)
    y = curve.energies
    h = np.diff(u)
    if np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        # uneven grid: plain centered differences with local steps
        du = np.gradient(y, u)
        d2 = np.gradient(du, u)
        return curve.masses[1:-1], (d2 - du)[1:-1]
    h = h[0]
    d1 = (y[2:] - y[:-2]) / (2 * h)
    d2 = (y[2:] - 2 * y[1:-1] + y[:-2]) / (h * h)
    D = d2 - d1
    masses = curve.masses[1:-1]
    if len(y) >= 5:
        d1w = (y[4:] - y[:-4]) / (4 * h)
        d2w = (y[4:] - 2 * y[2:-2] + y[:-4]) / (4 * h * h)
        Dw = d2w - d1w
        D = D.copy()
        D[1:-1] = (4 * D[1:-1] - Dw) / 3
    return masses, D


def regime_split(curve: EnergyCurve, require_crossover: bool = False) -> RegimeSplit:
    """Concave and convex mass ranges of the curve by the sign of the
    (log-grid) second derivative, with the crossover interpolated at the
    sign change.

    A curve that never changes sign is a single regime; pass
    ``require_crossover`` to make that an error instead.
    """
    masses, D = _log_second_difference(curve)
    if len(masses) < 2:
        raise ValueError("the grid is too small to classify regimes")
    neg = D < 0
    if neg.all() or (~neg).all():
        if require_crossover:
            raise ValueError("crossover not bracketed by the mass grid")
        full = (float(curve.masses[0]), float(curve.masses[-1]))
        if neg.all():
            return RegimeSplit(full, None, None)
        return RegimeSplit(None, full, None)
    # first sign change of D; interpolate its zero linearly in log mass
    idx = int(np.argmax(np.diff(neg.astype(int)) != 0))
    u0, u1 = np.log(masses[idx]), np.log(masses[idx + 1])
    d0, d1 = D[idx], D[idx + 1]
    cross = float(np.exp(u0 - d0 * (u1 - u0) / (d1 - d0)))
    low = (float(curve.masses[0]), cross)
    high = (cross, float(curve.masses[-1]))
    if neg[idx]:
        return RegimeSplit(low, high, cross)
    return RegimeSplit(high, low, cross)

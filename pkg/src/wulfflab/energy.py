"""Free energy: anisotropic surface term plus radial potential term.

The surface energy integrates a positively 1-homogeneous tension f over
boundary normals; the potential energy integrates g(x) = h(|x|) over the
set.  Both reduce to quadratures over the boundary samples or the radial
profile, with closed forms used whenever the catalogue entry has one, so
the workhorse cases (power-law h on radial shapes) are exact to roundoff.

Wulff shapes are built the direct way: sample directions, intersect the
halfspaces <x, v> <= f(v).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .shapes import (
    BoundarySamples,
    GridShape,
    PolygonShape,
    RadialShape,
    Shape,
    direction_grid,
)

__all__ = [
    "EnergyBreakdown",
    "RadialPotential",
    "SurfaceTension",
    "free_energy",
    "polygon_radial_integral",
    "potential_energy",
    "surface_energy",
    "wulff_shape",
]


# ---------------------------------------------------------------------------
# surface tensions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceTension:
    """Positively 1-homogeneous integrand evaluated on unit normals.

    ``func`` maps an (k, n) array of unit vectors to (k,) values; the
    1-homogeneous extension f(x) = |x| f(x/|x|) is implicit.  ``hessian``
    (optional) evaluates D^2 f at a unit vector, needed only by the
    anisotropic curvature diagnostics; a finite-difference fallback is
    used when it is absent.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    isotropic: bool = False
    hessian: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, directions: np.ndarray) -> np.ndarray:
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        norms = np.linalg.norm(directions, axis=1)
        if np.any(norms == 0):
            raise ValueError("surface tension is evaluated on nonzero vectors")
        vals = np.asarray(self.func(directions / norms[:, None]), dtype=float)
        return vals * norms

    def hessian_at(self, direction: np.ndarray, step: float = 1e-5) -> np.ndarray:
        """D^2 f at a unit vector (analytic when available, else central
        finite differences of the 1-homogeneous extension)."""
        v = np.asarray(direction, dtype=float)
        v = v / np.linalg.norm(v)
        if self.hessian is not None:
            return np.asarray(self.hessian(v), dtype=float)
        n = v.size
        eye = np.eye(n) * step

        def f1(x):
            return float(self(x[None, :])[0])

        H = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                H[i, j] = H[j, i] = (
                    f1(v + eye[i] + eye[j])
                    - f1(v + eye[i] - eye[j])
                    - f1(v - eye[i] + eye[j])
                    + f1(v - eye[i] - eye[j])
                ) / (4 * step * step)
        return H

    # -- catalogue -----------------------------------------------------------

    @staticmethod
    def isotropic_tension() -> "SurfaceTension":
        def hess(v):
            return np.eye(v.size) - np.outer(v, v)

        return SurfaceTension(
            "isotropic", lambda d: np.ones(len(d)), isotropic=True, hessian=hess
        )

    @staticmethod
    def p_norm(p: float) -> "SurfaceTension":
        if p < 1:
            raise ValueError("p-norm tensions need p >= 1")
        if np.isinf(p):
            return SurfaceTension("pnorm:inf", lambda d: np.abs(d).max(axis=1))
        return SurfaceTension(
            f"pnorm:{p:g}",
            lambda d: np.sum(np.abs(d) ** p, axis=1) ** (1 / p),
            isotropic=(p == 2),
        )

    @staticmethod
    def crystalline(normals, values) -> "SurfaceTension":
        """Support function of the polytope {x : <x, u_i> <= h_i}; its Wulff
        shape is that polytope.  Needs h_i > 0 (origin interior)."""
        from scipy.spatial import HalfspaceIntersection

        normals = np.asarray(normals, dtype=float)
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0):
            raise ValueError("crystalline facet values must be positive")
        normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
        halfspaces = np.column_stack([normals, -values])
        hs = HalfspaceIntersection(halfspaces, np.zeros(normals.shape[1]))
        vertices = hs.intersections

        return SurfaceTension(
            "crystalline", lambda d: np.max(d @ vertices.T, axis=1)
        )


# ---------------------------------------------------------------------------
# radial potentials
# ---------------------------------------------------------------------------

# composite Gauss-Legendre nodes on [0, 1]: 8 panels x order 12, exact for
# polynomials through degree 23 on each panel and spectrally accurate for
# smooth integrands
def _composite_gauss01(panels: int = 8, order: int = 12):
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for p in range(panels):
        lo, hi = p / panels, (p + 1) / panels
        nodes.append((x + 1) * (hi - lo) / 2 + lo)
        weights.append(w * (hi - lo) / 2)
    return np.concatenate(nodes), np.concatenate(weights)


_G_NODES, _G_WEIGHTS = _composite_gauss01()


@dataclass(frozen=True)
class RadialPotential:
    """Confinement term g(x) = h(|x|) with h nondecreasing and h(0) = 0.

    ``func`` is vectorized over radii.  ``homogeneity`` is set when
    h(t) = h(1) t^alpha, unlocking closed-form radial integrals; ``convex``
    gates the certificates that need a supporting slope; ``right_slope``
    returns the right derivative of h (a valid supporting slope on t >= a
    for convex h).
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    nondecreasing: bool = True
    convex: bool = False
    homogeneity: float | None = None
    right_slope_func: Callable[[float], float] | None = None
    radial_integral_func: Callable[[np.ndarray, int], np.ndarray] | None = None

    def __post_init__(self):
        v0 = float(np.asarray(self.func(np.array([0.0])))[0])
        if abs(v0) > 1e-12:
            raise ValueError("radial potentials must vanish at the origin")

    def __call__(self, radii: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(np.asarray(radii, dtype=float)), dtype=float)

    def right_slope(self, a: float) -> float:
        """Right derivative of h at a; the forward-difference fallback
        (step 1e-6 a) overestimates by O(step) for convex h, which is within
        every certificate's slack budget."""
        if self.right_slope_func is not None:
            return float(self.right_slope_func(a))
        step = 1e-6 * max(a, 1e-9)
        return float((self(np.array([a + step])) - self(np.array([a])))[0] / step)

    def radial_integral(self, radii: np.ndarray, n: int) -> np.ndarray:
        """int_0^r h(t) t^(n-1) dt, vectorized over r.

        Closed form for homogeneous and piecewise-linear h; composite Gauss
        quadrature otherwise (exact for polynomial h up to degree 23).
        """
        radii = np.asarray(radii, dtype=float)
        if self.radial_integral_func is not None:
            return np.asarray(self.radial_integral_func(radii, n), dtype=float)
        if self.homogeneity is not None:
            alpha = self.homogeneity
            h1 = float(self(np.array([1.0]))[0])
            return h1 * radii ** (n + alpha) / (n + alpha)
        r = radii[..., None]
        t = r * _G_NODES
        vals = self(t.ravel()).reshape(t.shape)
        return np.sum(vals * (_G_NODES ** (n - 1)) * _G_WEIGHTS, axis=-1) * r[..., 0] ** n

    # -- catalogue -----------------------------------------------------------

    @staticmethod
    def power(alpha: float) -> "RadialPotential":
        if alpha <= 0:
            raise ValueError("power potentials need alpha > 0")
        return RadialPotential(
            f"power:{alpha:g}",
            lambda t: t**alpha,
            nondecreasing=True,
            convex=alpha >= 1,
            homogeneity=alpha,
            right_slope_func=lambda a: alpha * a ** (alpha - 1),
        )

    @staticmethod
    def linear() -> "RadialPotential":
        return RadialPotential(
            "linear", lambda t: t, nondecreasing=True, convex=True,
            homogeneity=1.0, right_slope_func=lambda a: 1.0,
        )

    @staticmethod
    def quadratic() -> "RadialPotential":
        return RadialPotential(
            "quadratic", lambda t: t * t, nondecreasing=True, convex=True,
            homogeneity=2.0, right_slope_func=lambda a: 2.0 * a,
        )

    @staticmethod
    def zero() -> "RadialPotential":
        return RadialPotential(
            "zero", lambda t: np.zeros_like(t), nondecreasing=True, convex=True,
            right_slope_func=lambda a: 0.0,
        )

    @staticmethod
    def table(knots, values) -> "RadialPotential":
        """Piecewise-linear h through (knots, values); extended linearly past
        the last knot.  Slopes must be nonnegative; convexity is detected."""
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots[0] != 0 or values[0] != 0:
            raise ValueError("tables must start at h(0) = 0")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("table knots must be strictly increasing")
        slopes = np.diff(values) / np.diff(knots)
        if np.any(slopes < -1e-15):
            raise ValueError("table potentials must be nondecreasing")
        convex = bool(np.all(np.diff(slopes) >= -1e-12))

        def func(t):
            t = np.asarray(t, dtype=float)
            out = np.interp(t, knots, values)
            past = t > knots[-1]
            if np.any(past):
                out = np.where(past, values[-1] + slopes[-1] * (t - knots[-1]), out)
            return out

        def rslope(a):
            if a >= knots[-1]:
                return float(slopes[-1])
            return float(slopes[np.searchsorted(knots, a, side="right") - 1])

        # per-piece h(t) = c_i + s_i t with c_i = v_i - s_i k_i, so
        # int h(t) t^(n-1) dt = c_i t^n / n + s_i t^(n+1) / (n+1) exactly;
        # the last piece extends past the final knot
        piece_lo = knots
        piece_hi = np.append(knots[1:], np.inf)
        piece_s = np.append(slopes, slopes[-1])
        piece_c = values - piece_s * knots

        def exact_integral(r, n):
            r = np.asarray(r, dtype=float)
            flat = r.ravel()
            out = np.zeros_like(flat)
            for c, s, lo, hi in zip(piece_c, piece_s, piece_lo, piece_hi):
                upper = np.minimum(np.maximum(flat, lo), hi)
                out += (c * (upper**n - lo**n) / n
                        + s * (upper ** (n + 1) - lo ** (n + 1)) / (n + 1))
            return out.reshape(r.shape)

        return RadialPotential(
            "table", func, nondecreasing=True, convex=convex,
            right_slope_func=rslope, radial_integral_func=exact_integral,
        )


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyBreakdown:
    surface: float
    potential: float

    @property
    def total(self) -> float:
        return self.surface + self.potential


def surface_energy(shape: Shape, tension: SurfaceTension) -> float:
    """int_{boundary} f(nu) dH^{n-1} over the shape's boundary samples."""
    bs = shape.boundary_samples()
    if bs.weights.size == 0:
        return 0.0
    return float(np.sum(tension(bs.normals) * bs.weights))


def polygon_radial_integral(shape: PolygonShape, radial_antiderivative) -> float:
    """int_S phi(|x|) dx for a polygon, by signed origin-fan triangles in
    polar form; ``radial_antiderivative(r)`` must return
    int_0^r phi(t) t dt, vectorized.

    Each edge contributes sign(dtheta) * int Phi(R(theta)) dtheta with
    R(theta) the polar form of the edge line; Gauss quadrature in theta is
    spectrally accurate over each edge's angular span.
    """
    gx, gw = np.polynomial.legendre.leggauss(24)
    total = 0.0
    for loop in shape.loops:
        p = loop
        q = np.roll(loop, -1, axis=0)
        edge = q - p
        length = np.linalg.norm(edge, axis=1)
        keep = length > 0
        p, q, edge, length = p[keep], q[keep], edge[keep], length[keep]
        t = edge / length[:, None]
        # foot of the perpendicular from the origin to the edge line
        d = p[:, 0] * t[:, 1] - p[:, 1] * t[:, 0]
        phi = np.arctan2(-t[:, 0], t[:, 1])
        th_p = np.arctan2(p[:, 1], p[:, 0])
        th_q = np.arctan2(q[:, 1], q[:, 0])
        dth = np.mod(th_q - th_p + np.pi, 2 * np.pi) - np.pi
        ok = np.abs(d) > 1e-14
        # signed fan integral per edge; R(theta) = d / cos(theta - phi)
        th0 = th_p[ok]
        span = dth[ok]
        dd = np.abs(d[ok])
        ph = phi[ok] + np.where(d[ok] < 0, np.pi, 0.0)
        nodes = th0[:, None] + (gx[None, :] + 1) * span[:, None] / 2
        R = dd[:, None] / np.cos(nodes - ph[:, None])
        vals = radial_antiderivative(np.abs(R))
        total += float(np.sum(np.sum(vals * gw[None, :], axis=1) * span / 2))
    return total


def potential_energy(shape: Shape, potential: RadialPotential) -> float:
    """int_S h(|x|) dx with encoding-native quadrature: closed-form or Gauss
    per ray on radial shapes, midpoint over cell centers on grids, signed
    polar fans on polygons."""
    n = shape.dimension
    if isinstance(shape, RadialShape):
        vals = potential.radial_integral(shape.radii, n)
        return float(np.sum(shape.weights * vals))
    if isinstance(shape, GridShape):
        centers = shape.filled_centers()
        if centers.size == 0:
            return 0.0
        r = np.linalg.norm(centers, axis=1)
        return float(np.sum(potential(r)) * shape.cell_size**n)
    if isinstance(shape, PolygonShape):
        return polygon_radial_integral(shape, lambda r: potential.radial_integral(r, 2))
    raise TypeError(f"unsupported shape type {type(shape).__name__}")


def free_energy(shape: Shape, tension: SurfaceTension, potential: RadialPotential) -> EnergyBreakdown:
    """E(S) = F(S) + G(S), reported as a breakdown."""
    return EnergyBreakdown(surface_energy(shape, tension), potential_energy(shape, potential))


# ---------------------------------------------------------------------------
# Wulff shapes
# ---------------------------------------------------------------------------

def wulff_shape(
    tension: SurfaceTension,
    dimension: int = 2,
    directions: int = 256,
    resolution: float | None = None,
) -> Shape:
    """K = intersection over sampled v of {x : <x, v> <= f(v)}.

    Returns an exact polygon of the sampled halfspace intersection in 2D and
    a rasterized grid in 3D (``resolution`` is the cell size, default
    max f / 64); in 1D the interval [-f(-1), f(1)].
    """
    dirs, _ = direction_grid(dimension, directions if dimension > 1 else 2)
    values = tension(dirs)
    if np.any(values <= 0):
        raise ValueError("surface tension must be positive on the sphere")
    if dimension == 1:
        return RadialShape([values[0], values[1]], 1)
    if dimension == 2:
        from scipy.spatial import HalfspaceIntersection

        halfspaces = np.column_stack([dirs, -values])
        hs = HalfspaceIntersection(halfspaces, np.zeros(2))
        pts = hs.intersections
        order = np.argsort(np.arctan2(pts[:, 1], pts[:, 0]))
        pts = pts[order]
        # collapse duplicate intersection vertices
        keep = np.ones(len(pts), dtype=bool)
        for i in range(1, len(pts)):
            if np.linalg.norm(pts[i] - pts[i - 1]) < 1e-12 * values.max():
                keep[i] = False
        return PolygonShape([pts[keep]])
    if dimension == 3:
        rmax = float(values.max())
        delta = resolution if resolution is not None else rmax / 64

        def inside(p):
            return np.max(p @ dirs.T - values[None, :], axis=1) <= 0

        lo = -(rmax + 2 * delta) * np.ones(3)
        hi = (rmax + 2 * delta) * np.ones(3)
        return GridShape.from_indicator(inside, lo, hi, delta)
    raise ValueError("Wulff shapes are built in 1, 2, or 3 dimensions")

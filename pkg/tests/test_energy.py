import numpy as np
import pytest

from wulfflab.energy import (
    RadialPotential,
    SurfaceTension,
    free_energy,
    potential_energy,
    surface_energy,
    wulff_shape,
)
from wulfflab.shapes import Ball, PolygonShape, RadialShape, mass, rasterize


def test_isotropic_surface_energy_is_perimeter():
    assert surface_energy(Ball((0.0, 0.0), 1.0).to_radial(512),
                          SurfaceTension.isotropic_tension()) == pytest.approx(2 * np.pi, rel=1e-9)
    assert surface_energy(RadialShape(np.array([0.5, 0.5]), 1),
                          SurfaceTension.isotropic_tension()) == pytest.approx(2.0, rel=1e-12)
    square = PolygonShape([[(0, 0), (1, 0), (1, 1), (0, 1)]])
    assert surface_energy(square, SurfaceTension.isotropic_tension()) == pytest.approx(4.0, rel=1e-12)


def test_isotropic_sphere_area_from_radial_quadrature():
    # the spiral-point quadrature is first order in the ray count
    iso = SurfaceTension.isotropic_tension()
    coarse = surface_energy(Ball((0.0, 0.0, 0.0), 1.0).to_radial(2000), iso)
    fine = surface_energy(Ball((0.0, 0.0, 0.0), 1.0).to_radial(8000), iso)
    assert coarse == pytest.approx(4 * np.pi, rel=2e-3)
    assert fine == pytest.approx(4 * np.pi, rel=5e-4)
    assert abs(fine - 4 * np.pi) < abs(coarse - 4 * np.pi)


def test_one_norm_tension_on_the_axis_square():
    # every edge normal is +-e_i, where the 1-norm equals the 2-norm
    square = PolygonShape([[(0, 0), (1, 0), (1, 1), (0, 1)]])
    assert surface_energy(square, SurfaceTension.p_norm(1)) == pytest.approx(4.0, rel=1e-12)
    # the rotated square sees diagonal normals, where the 1-norm is sqrt(2)
    # times larger: perimeter 4 sqrt(2) times f = sqrt(2) gives 8
    diamond = PolygonShape([[(1, 0), (0, 1), (-1, 0), (0, -1)]])
    assert surface_energy(diamond, SurfaceTension.p_norm(1)) == pytest.approx(8.0, rel=1e-12)


def test_potential_energy_closed_forms_on_the_ball():
    quad = RadialPotential.quadratic()
    radial = Ball((0.0, 0.0), 1.0).to_radial(512)
    assert potential_energy(radial, quad) == pytest.approx(np.pi / 2, rel=1e-12)
    assert potential_energy(Ball((0.0, 0.0), 1.0).to_polygon(512), quad) == pytest.approx(
        np.pi / 2, rel=1e-3)
    assert potential_energy(rasterize(Ball((0.0, 0.0), 1.0).to_polygon(512), 0.02),
                            quad) == pytest.approx(np.pi / 2, rel=1e-2)
    linear = RadialPotential.linear()
    assert potential_energy(radial, linear) == pytest.approx(2 * np.pi / 3, rel=1e-12)


def test_power_potentials_report_their_structure():
    cub = RadialPotential.power(3.0)
    assert cub.homogeneity == 3.0
    assert cub.nondecreasing and cub.convex
    assert cub.right_slope(0.5) == pytest.approx(3 * 0.25, rel=1e-9)
    half = RadialPotential.power(0.5)
    assert half.nondecreasing and not half.convex
    assert RadialPotential.quadratic().right_slope(1.0) == pytest.approx(2.0, rel=1e-9)
    assert RadialPotential.linear().right_slope(1.0) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(ValueError):
        RadialPotential.power(-1.0)


def test_zero_potential_vanishes_and_is_admissible():
    zero = RadialPotential.zero()
    assert zero.nondecreasing
    assert potential_energy(Ball((0.0, 0.0), 2.0).to_radial(64), zero) == 0.0


def test_table_potential_interpolates_and_integrates_piecewise():
    g = RadialPotential.table([0.0, 1.0, 2.0], [0.0, 1.0, 3.0])
    assert g(np.array([0.5]))[0] == pytest.approx(0.5, rel=1e-12)
    assert g(np.array([1.5]))[0] == pytest.approx(2.0, rel=1e-12)
    assert g.right_slope(0.5) == pytest.approx(1.0, rel=1e-12)
    assert g.right_slope(1.0) == pytest.approx(2.0, rel=1e-12)
    assert g.nondecreasing and g.convex
    # int over B_2 in 2D: 2 pi int_0^2 g(t) t dt, with the piecewise parts
    # int_0^1 t^2 dt = 1/3 and int_1^2 (2t - 1) t dt = 14/3 - 3/2
    exact = 2 * np.pi * (1 / 3 + 14 / 3 - 3 / 2)
    ball = Ball((0.0, 0.0), 2.0).to_radial(64)
    assert potential_energy(ball, g) == pytest.approx(exact, rel=1e-12)
    with pytest.raises(ValueError, match="nondecreasing"):
        RadialPotential.table([0.0, 1.0, 2.0], [0.0, 2.0, 1.0])


def test_free_energy_splits_into_surface_and_potential():
    shape = Ball((0.0, 0.0), 1.0).to_radial(256)
    breakdown = free_energy(shape, SurfaceTension.isotropic_tension(), RadialPotential.quadratic())
    assert breakdown.total == breakdown.surface + breakdown.potential
    assert breakdown.surface == pytest.approx(2 * np.pi, rel=1e-9)
    assert breakdown.potential == pytest.approx(np.pi / 2, rel=1e-9)


def test_wulff_shape_of_isotropic_tension_is_the_ball():
    w = wulff_shape(SurfaceTension.isotropic_tension(), dimension=2, directions=512)
    assert mass(w) == pytest.approx(np.pi, rel=1e-3)


def test_wulff_shape_of_one_norm_is_the_max_ball():
    w = wulff_shape(SurfaceTension.p_norm(1), dimension=2, directions=256)
    assert mass(w) == pytest.approx(4.0, rel=1e-12)
    assert w.bounding_radius() == pytest.approx(np.sqrt(2), rel=1e-9)


@pytest.mark.parametrize("tension", [
    SurfaceTension.p_norm(1),
    SurfaceTension.p_norm(3),
    SurfaceTension.crystalline(
        [[1, 0], [0, 1], [-1, 0], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]],
        [1.0, 1.0, 1.0, 1.0, 1.3, 1.3, 1.3, 1.3],
    ),
])
def test_wulff_surface_energy_identity(tension):
    # F(W) = n |W| for the construction's own shape
    w = wulff_shape(tension, dimension=2, directions=256)
    assert surface_energy(w, tension) == pytest.approx(2 * mass(w), rel=1e-9)


def test_three_dimensional_wulff_ball():
    w = wulff_shape(SurfaceTension.isotropic_tension(), dimension=3, resolution=1 / 24)
    assert mass(w) == pytest.approx(4 * np.pi / 3, rel=3e-2)


def test_isotropic_hessian_is_the_tangential_projector():
    f = SurfaceTension.isotropic_tension()
    nu = np.array([0.0, 0.0, 1.0])
    hess = f.hessian_at(nu)
    expected = np.diag([1.0, 1.0, 0.0])
    assert np.allclose(hess, expected, atol=1e-5)


def test_tension_flags():
    assert SurfaceTension.isotropic_tension().isotropic
    assert not SurfaceTension.p_norm(1).isotropic
    assert SurfaceTension.p_norm(2).isotropic

import numpy as np
import pytest

from wulfflab.energy import RadialPotential, SurfaceTension
from wulfflab.shapes import PolygonShape, mass, rasterize
from wulfflab.stability import centered_asymmetry
from wulfflab.symmetrize import default_plan, steiner_symmetrize, symmetrization_descent


def rectangle(width, height):
    w, h = width / 2, height / 2
    return PolygonShape([[(-w, -h), (w, -h), (w, h), (-w, h)]])


def test_steiner_preserves_mass_on_polygons():
    tri = PolygonShape([[(0, 0), (3, 0), (0, 2)]])
    for w in [(1, 0), (0, 1), (1, 1)]:
        out = steiner_symmetrize(tri, w)
        assert mass(out) == pytest.approx(mass(tri), rel=1e-9)


def test_steiner_preserves_grid_cell_count():
    grid = rasterize(rectangle(1, 3), 1 / 32)
    out = steiner_symmetrize(grid, (1, 0))
    assert out.cell_count() == grid.cell_count()
    out2 = steiner_symmetrize(grid, (0, 1))
    assert out2.cell_count() == grid.cell_count()


def test_steiner_symmetrizes_the_direction():
    # symmetrizing along e1 turns every row into one contiguous run whose
    # center lands within half a cell of the hyperplane x = 0 (integer
    # stacking cannot do better than half a cell)
    grid = rasterize(PolygonShape([[(0, 0), (2, 0), (2, 1), (0, 1)]]), 1 / 32)
    out = steiner_symmetrize(grid, (1, 0))
    delta = out.cell_size
    rows = 0
    for iy in range(out.cells.shape[1]):
        xs = np.flatnonzero(out.cells[:, iy])
        if xs.size == 0:
            continue
        rows += 1
        assert np.array_equal(xs, np.arange(xs[0], xs[0] + xs.size))
        lo = out.origin[0] + (xs[0] + 0.5) * delta
        hi = out.origin[0] + (xs[-1] + 0.5) * delta
        assert abs((lo + hi) / 2) <= delta / 2 + 1e-12
    assert rows > 0


def test_steiner_does_not_increase_perimeter():
    iso = SurfaceTension.isotropic_tension()
    from wulfflab.energy import surface_energy

    tri = PolygonShape([[(0, 0), (3, 0), (0.5, 2)]])
    out = steiner_symmetrize(tri, (1, 0))
    assert surface_energy(out, iso) <= surface_energy(tri, iso) + 1e-9


def test_default_plan_is_deterministic():
    a = default_plan(2, randomized=4, seed=9)
    b = default_plan(2, randomized=4, seed=9)
    assert np.allclose(np.asarray(a.directions), np.asarray(b.directions))
    c = default_plan(2, randomized=4, seed=10)
    assert not np.allclose(np.asarray(a.directions), np.asarray(c.directions))


def test_descent_monotone_on_a_coarse_grid():
    grid = rasterize(rectangle(1, 4), 1 / 32)
    plan = default_plan(2, max_iterations=40, stop_asymmetry=1e-3)
    trail = symmetrization_descent(
        grid, plan, SurfaceTension.isotropic_tension(), RadialPotential.quadratic()
    )
    assert trail[0].iteration == 0
    f0 = trail[0].energy.surface
    g0 = trail[0].energy.potential
    for prev, cur in zip(trail, trail[1:]):
        assert cur.iteration == prev.iteration + 1
        assert cur.energy.surface <= prev.energy.surface + 5e-3 * f0
        assert cur.energy.potential <= prev.energy.potential + 1e-9 * g0
    assert trail[-1].asymmetry < trail[0].asymmetry


def test_descent_conserves_mass_exactly():
    grid = rasterize(rectangle(1, 2), 1 / 32)
    plan = default_plan(2, max_iterations=10)
    trail = symmetrization_descent(
        grid, plan, SurfaceTension.isotropic_tension(), RadialPotential.quadratic()
    )
    # the descent records energies only; replay its direction cycle to get
    # the intermediate shapes and check the cell count never moves
    shape = grid
    for i in range(1, len(trail)):
        shape = steiner_symmetrize(shape, plan.directions[(i - 1) % len(plan.directions)])
        assert shape.mass() == pytest.approx(grid.mass(), rel=1e-12)


def test_descent_refuses_anisotropic_tension():
    grid = rasterize(rectangle(1, 2), 1 / 16)
    with pytest.raises(ValueError):
        symmetrization_descent(
            grid, default_plan(2, max_iterations=2),
            SurfaceTension.p_norm(1), RadialPotential.quadratic(),
        )


def test_descent_refuses_decreasing_potential():
    grid = rasterize(rectangle(1, 2), 1 / 16)
    # table() refuses decreasing data, so build the flag by hand
    bump = RadialPotential("dip", lambda t: -np.asarray(t, dtype=float), nondecreasing=False)
    with pytest.raises(ValueError):
        symmetrization_descent(
            grid, default_plan(2, max_iterations=2),
            SurfaceTension.isotropic_tension(), bump,
        )


def test_descent_stops_at_the_asymmetry_target():
    grid = rasterize(rectangle(1, 1.2), 1 / 32)
    plan = default_plan(2, max_iterations=100, stop_asymmetry=0.2)
    trail = symmetrization_descent(
        grid, plan, SurfaceTension.isotropic_tension(), RadialPotential.quadratic()
    )
    assert len(trail) - 1 < 100
    assert trail[-1].asymmetry < 0.2


def test_symmetrized_rectangle_approaches_the_disk():
    grid = rasterize(rectangle(1, 2), 1 / 64)
    plan = default_plan(2, max_iterations=60, stop_asymmetry=5e-3)
    trail = symmetrization_descent(
        grid, plan, SurfaceTension.isotropic_tension(), RadialPotential.quadratic()
    )
    assert trail[-1].asymmetry < 0.1
    assert trail[-1].asymmetry <= centered_asymmetry(grid)

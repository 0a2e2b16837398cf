import numpy as np
import pytest

from wulfflab.curvature import (
    SurfaceMesh,
    anisotropic_mean_curvature,
    certificate,
    curvature_fields,
    ellipsoid_mesh,
    icosphere,
    multiplier_mu,
    q_at_minus_one,
    q_coefficient,
    quadric_curvatures,
    read_mesh,
    torus_mesh,
)
from wulfflab.energy import RadialPotential, SurfaceTension

ISO = SurfaceTension.isotropic_tension()
QUAD = RadialPotential.quadratic()


def test_sphere_fields_match_closed_forms():
    mesh = icosphere(4, radius=2.0)
    fields = curvature_fields(mesh)
    assert np.max(np.abs(fields.H - 1.0)) < 1e-2
    assert np.max(np.abs(fields.A2 - 0.5)) / 0.5 < 1e-2
    assert np.max(np.abs(fields.K - 0.25)) / 0.25 < 1e-2
    assert np.allclose(fields.kappa1, 0.5, atol=5e-3)
    assert np.allclose(fields.kappa2, 0.5, atol=5e-3)


def test_gauss_bonnet_is_exact_for_angle_defects():
    sphere = icosphere(3)
    total = curvature_fields(sphere).total_gauss
    assert abs(total - 4 * np.pi) < 1e-6 * 4 * np.pi

    torus = torus_mesh()
    assert abs(curvature_fields(torus).total_gauss) < 1e-6


def test_euler_characteristics():
    assert icosphere(2).euler_characteristic() == 2
    assert torus_mesh(major=24, minor=12).euler_characteristic() == 0


def test_squared_second_form_identity_is_structural():
    fields = curvature_fields(icosphere(3))
    assert np.max(np.abs(fields.A2 - (fields.H**2 - 2 * fields.K))) == 0.0


def test_principal_product_inequality():
    for mesh in (icosphere(3), torus_mesh(major=32, minor=16), ellipsoid_mesh((2, 1, 1))):
        fields = curvature_fields(mesh)
        lhs = 2 * np.abs(fields.kappa1 * fields.kappa2)
        rhs = fields.kappa1**2 + fields.kappa2**2
        assert np.all(lhs <= rhs + 1e-9)


def test_torus_closed_forms():
    R, r = 2.0, 0.5
    mesh = torus_mesh(R, r, 64, 32)
    fields = curvature_fields(mesh)
    rho = np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1])
    cos_t = (rho - R) / r
    k_exact = cos_t / (r * (R + r * cos_t))
    h_exact = cos_t / (R + r * cos_t) + 1 / r
    assert np.max(np.abs(fields.K - k_exact)) / np.max(np.abs(k_exact)) < 6e-3
    assert np.max(np.abs(fields.H - h_exact)) / np.max(np.abs(h_exact)) < 6e-3


def spheroid_principal_curvatures(vertices, a, b):
    """Closed forms for x^2/a^2 + (y^2+z^2)/b^2 = 1 with a > b (prolate):
    parallel curvature 1/(b^2 w) and meridian curvature 1/(a^2 b^2 w^3)
    with w^2 = x^2/a^4 + (y^2+z^2)/b^4; the parallel one is the larger."""
    x = vertices[:, 0]
    r2 = vertices[:, 1] ** 2 + vertices[:, 2] ** 2
    w = np.sqrt(x**2 / a**4 + r2 / b**4)
    return 1.0 / (b**2 * w), 1.0 / (a**2 * b**2 * w**3)


def test_spheroid_away_from_umbilics():
    # (2, 1, 1): the poles on the long axis are umbilic, curvatures are
    # compared on the complement
    mesh = ellipsoid_mesh((2.0, 1.0, 1.0))
    fields = curvature_fields(mesh)
    keep = np.abs(mesh.vertices[:, 0]) < 1.8
    kap1, kap2 = spheroid_principal_curvatures(mesh.vertices, 2.0, 1.0)
    err1 = np.max(np.abs(fields.kappa1[keep] - kap1[keep]) / np.abs(kap1[keep]))
    err2 = np.max(np.abs(fields.kappa2[keep] - kap2[keep]) / np.abs(kap2[keep]))
    assert err1 < 2e-2
    assert err2 < 2e-2


def test_quadric_fit_recovers_sphere_and_spheroid_curvatures():
    sphere = icosphere(3)
    k1, k2, _, _ = quadric_curvatures(sphere)
    assert np.max(np.abs(k1 * k2 - 1.0)) < 5e-3

    mesh = ellipsoid_mesh((2.0, 1.0, 1.0))
    fields = curvature_fields(mesh)
    k1, k2, e1, e2 = quadric_curvatures(mesh, fields)
    keep = np.abs(mesh.vertices[:, 0]) < 1.8
    kap1, kap2 = spheroid_principal_curvatures(mesh.vertices, 2.0, 1.0)
    k_exact = kap1 * kap2
    assert np.max(np.abs(k1 * k2 - k_exact)[keep] / k_exact[keep]) < 1e-2
    # frames are orthonormal and tangent
    normals = fields.normal
    assert np.max(np.abs(np.sum(e1 * e2, axis=1))) < 1e-9
    assert np.max(np.abs(np.sum(e1 * normals, axis=1))) < 1e-9
    assert np.allclose(np.linalg.norm(e1, axis=1), 1.0, atol=1e-9)


def test_anisotropic_mean_curvature_reduces_to_isotropic():
    mesh = icosphere(3, radius=2.0)
    fields = curvature_fields(mesh)
    hf = anisotropic_mean_curvature(mesh, ISO, fields)
    assert np.max(np.abs(hf - fields.H)) < 1e-6


def test_anisotropic_mean_curvature_on_the_sphere():
    # f(nu) = |nu| + 0.1 nu_3^2 / |nu| on the radius-a sphere has
    # H_f = (2.2 - 0.4 nu_3^2) / a
    a = 2.0
    mesh = icosphere(4, radius=a)
    f = SurfaceTension(
        "axial bump",
        lambda d: np.linalg.norm(d, axis=1) + 0.1 * d[:, 2] ** 2 / np.linalg.norm(d, axis=1),
    )
    fields = curvature_fields(mesh)
    hf = anisotropic_mean_curvature(mesh, f, fields)
    nu3 = fields.normal[:, 2]
    exact = (2.2 - 0.4 * nu3**2) / a
    assert np.max(np.abs(hf - exact)) < 1e-4


def test_multiplier_closed_forms_on_spheres():
    mesh = icosphere(4)
    zero = RadialPotential.zero()
    assert multiplier_mu(mesh, ISO, zero) == pytest.approx(2.0, rel=5e-3)
    mesh2 = icosphere(4, radius=2.0)
    assert multiplier_mu(mesh2, ISO, QUAD) == pytest.approx(5.0, rel=5e-3)


def test_certificate_on_the_sphere_is_convex():
    mesh = icosphere(3, radius=2.0)
    cert = certificate(mesh, QUAD, -1.0)
    assert cert.verdict
    assert cert.v_field.min() > 0.4
    # a sphere sits at omega = |A|^2 / H^2 = 1/2
    assert np.max(np.abs(cert.omega - 0.5)) < 5e-3
    assert np.max(np.abs(cert.epsilon + 0.5)) < 5e-3
    assert cert.q_value == pytest.approx(q_coefficient(-0.5, -1.0), abs=5e-3)
    assert cert.tolerance > 0
    assert np.all(cert.gradient_norm >= 0)


def test_certificate_flags_the_torus():
    cert = certificate(torus_mesh(), QUAD, -1.0)
    assert not cert.verdict
    assert cert.v_field.min() < -1.0


def test_certificate_rejects_nonnegative_exponent():
    with pytest.raises(ValueError):
        certificate(icosphere(2), QUAD, 0.5)


def test_certificate_rejects_nonpositive_mean_curvature():
    mesh = icosphere(2)
    dented = mesh.vertices.copy()
    dented[0] *= -0.5
    bad = SurfaceMesh(dented, mesh.triangles)
    with pytest.raises(ValueError):
        certificate(bad, QUAD, -1.0)


def test_q_coefficient_paths_agree():
    eps = np.linspace(-0.5, 3.0, 29)
    for e in eps:
        assert abs(q_coefficient(float(e), -1.0) - q_at_minus_one(float(e))) <= 1e-12
    assert q_at_minus_one(0.1) == pytest.approx(0.1**2 / (2 * 1.1), abs=1e-15)


def test_mesh_validation_catches_defects():
    v = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValueError):
        SurfaceMesh(v, np.array([[0, 1, 7]]))
    with pytest.raises(ValueError):
        SurfaceMesh(v, np.array([[0, 1, 1]]))
    # a tetrahedron with an extra face glued to one edge is not a manifold
    tet = np.array([[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]])
    v5 = np.vstack([v, [1.0, 1.0, 1.0]])
    with pytest.raises(ValueError, match="edge"):
        SurfaceMesh(v5, np.vstack([tet, [[0, 1, 4]]]))
    # an open strip has boundary edges
    with pytest.raises(ValueError):
        SurfaceMesh(v, np.array([[0, 1, 2]]))


def test_orientation_is_normalized_outward():
    mesh = icosphere(1)
    flipped = SurfaceMesh(mesh.vertices, mesh.triangles[:, ::-1])
    assert flipped.enclosed_volume() > 0
    assert flipped.enclosed_volume() == pytest.approx(mesh.enclosed_volume(), rel=1e-12)


def test_icosphere_volume_converges():
    coarse = icosphere(2).enclosed_volume()
    fine = icosphere(4).enclosed_volume()
    target = 4 * np.pi / 3
    assert abs(fine - target) < abs(coarse - target)
    assert abs(fine - target) < 0.02


def test_ellipsoid_mesh_volume_and_axis_permutation():
    for axes in [(2.0, 1.0, 1.0), (1.0, 2.0, 1.0), (1.0, 1.0, 2.0)]:
        mesh = ellipsoid_mesh(axes, rings=32, segments=48)
        assert mesh.euler_characteristic() == 2
        assert mesh.enclosed_volume() == pytest.approx(
            4 * np.pi / 3 * np.prod(axes), rel=2e-2)


def test_triaxial_ellipsoid_falls_back_to_the_icosphere():
    mesh = ellipsoid_mesh((3.0, 2.0, 1.0), subdivisions=3)
    assert mesh.euler_characteristic() == 2
    assert mesh.enclosed_volume() == pytest.approx(8 * np.pi, rel=3e-2)


def test_mesh_file_round_trips(tmp_path):
    mesh = icosphere(1, radius=1.5)

    off = tmp_path / "m.off"
    lines = ["OFF", f"{len(mesh.vertices)} {len(mesh.triangles)} 0"]
    lines += [" ".join(repr(float(c)) for c in v) for v in mesh.vertices]
    lines += ["3 " + " ".join(str(i) for i in t) for t in mesh.triangles]
    off.write_text("\n".join(lines) + "\n")
    back = read_mesh(str(off))
    assert len(back.vertices) == len(mesh.vertices)
    assert back.enclosed_volume() == pytest.approx(mesh.enclosed_volume(), rel=1e-12)

    import struct

    stl = tmp_path / "m.stl"
    with open(stl, "wb") as fh:
        fh.write(b"\0" * 80)
        fh.write(struct.pack("<I", len(mesh.triangles)))
        for tri in mesh.triangles:
            fh.write(struct.pack("<3f", 0.0, 0.0, 0.0))
            for idx in tri:
                fh.write(struct.pack("<3f", *mesh.vertices[idx]))
            fh.write(struct.pack("<H", 0))
    welded = read_mesh(str(stl))
    assert len(welded.vertices) == len(mesh.vertices)
    assert welded.enclosed_volume() == pytest.approx(
        mesh.enclosed_volume(), rel=1e-6)

    with pytest.raises(ValueError):
        read_mesh(str(tmp_path / "m.obj"))

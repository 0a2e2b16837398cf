"""Numerical certificates for free-energy minimization: Wulff shapes,
symmetrization descent, quantitative stability bounds, critical-mass
regimes, and discrete curvature diagnostics."""

from .curvature import (
    CurvatureCertificate,
    CurvatureFields,
    SurfaceMesh,
    anisotropic_mean_curvature,
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
from .curvature import certificate as curvature_certificate
from .energy import (
    EnergyBreakdown,
    RadialPotential,
    SurfaceTension,
    free_energy,
    potential_energy,
    surface_energy,
    wulff_shape,
)
from .mass import (
    EnergyCurve,
    RegimeSplit,
    ball_energy,
    critical_mass,
    energy_curve,
    regime_split,
    unit_ball_potential,
)
from .shapes import (
    Ball,
    GridShape,
    PolygonShape,
    RadialShape,
    Shape,
    ball_symmetric_difference_mass,
    direction_grid,
    intersection_mass,
    load_shape,
    mass,
    matched_ball,
    rasterize,
    save_shape,
    sphere_surface_measure,
    symmetric_difference_mass,
    unit_ball_volume,
)
from .stability import (
    AsymmetryResult,
    Certificate,
    ModulusFit,
    StabilityReport,
    TransportCertificate,
    asymmetry,
    centered_asymmetry,
    derivative_identity_check,
    family_shape,
    first_moment,
    modulus_sweep,
    potential_gap,
    stability_certificate,
    translation_lower_bound,
    transport_bound,
)
from .symmetrize import (
    DescentRecord,
    SymmetrizationPlan,
    default_plan,
    steiner_symmetrize,
    symmetrization_descent,
)

try:
    from importlib.metadata import version as _version

    __version__ = _version("artifact")
except Exception:
    __version__ = "0.0.0"

__all__ = [
    "AsymmetryResult",
    "Ball",
    "Certificate",
    "CurvatureCertificate",
    "CurvatureFields",
    "DescentRecord",
    "EnergyBreakdown",
    "EnergyCurve",
    "GridShape",
    "ModulusFit",
    "PolygonShape",
    "RadialPotential",
    "RadialShape",
    "RegimeSplit",
    "Shape",
    "StabilityReport",
    "SurfaceMesh",
    "SurfaceTension",
    "SymmetrizationPlan",
    "TransportCertificate",
    "anisotropic_mean_curvature",
    "asymmetry",
    "ball_energy",
    "ball_symmetric_difference_mass",
    "centered_asymmetry",
    "critical_mass",
    "curvature_certificate",
    "curvature_fields",
    "default_plan",
    "derivative_identity_check",
    "direction_grid",
    "ellipsoid_mesh",
    "energy_curve",
    "family_shape",
    "first_moment",
    "free_energy",
    "icosphere",
    "intersection_mass",
    "load_shape",
    "mass",
    "matched_ball",
    "modulus_sweep",
    "multiplier_mu",
    "potential_energy",
    "potential_gap",
    "q_at_minus_one",
    "q_coefficient",
    "quadric_curvatures",
    "rasterize",
    "read_mesh",
    "regime_split",
    "save_shape",
    "sphere_surface_measure",
    "stability_certificate",
    "steiner_symmetrize",
    "surface_energy",
    "symmetric_difference_mass",
    "symmetrization_descent",
    "torus_mesh",
    "translation_lower_bound",
    "transport_bound",
    "unit_ball_potential",
    "unit_ball_volume",
    "wulff_shape",
]

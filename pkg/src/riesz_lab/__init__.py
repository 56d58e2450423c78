"""Riesz energies, meromorphic pair integrals, and distance-distribution
geometry for curves, surfaces, and compact bodies."""

from .beta import (
    BetaValue,
    DiameterEstimate,
    MeromorphicSummary,
    PoleResidue,
    ProfilePolynomial,
    beta_eval,
    closed_form_beta,
    diameter_via_beta,
    fit_profile,
    residues,
)
from .constructions import (
    CaelliConfig,
    TailEstimate,
    TwoSphereConfig,
    caelli_pair,
    default_caelli_config,
    distance_tail,
    single_sphere_tail,
    single_sphere_tail_exact,
    tail_volume_ratio,
)
from .distributions import (
    ChordDistribution,
    CroftonMoments,
    DistanceDistribution,
    KSResult,
    chord_length_distribution,
    crofton_moments,
    interpoint_cdf,
    mellin_check,
    mellin_transform,
    two_sample_ks,
)
from .errors import DomainError
from .identify import (
    Budgets,
    Check,
    Fingerprint,
    Verdict,
    classify,
    fingerprint,
    radius_from_residue,
)
from .kernels import BACKEND
from .riesz import EnergyValue, body_energy_stokes, moebius_energy, riesz_energy
from .shapes import (
    Ball,
    Circle,
    Ellipse,
    PlanarComposite,
    Shape,
    Sphere,
    Torus,
    TransformedShape,
    UnionShape,
    load_shape,
    make_standard,
    shape_from_dict,
    two_spheres,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "DomainError",
    # shapes
    "Shape",
    "Circle",
    "Ellipse",
    "Sphere",
    "Torus",
    "Ball",
    "PlanarComposite",
    "TransformedShape",
    "UnionShape",
    "make_standard",
    "shape_from_dict",
    "load_shape",
    "two_spheres",
    # energies
    "EnergyValue",
    "riesz_energy",
    "body_energy_stokes",
    "moebius_energy",
    # continuation
    "ProfilePolynomial",
    "PoleResidue",
    "BetaValue",
    "MeromorphicSummary",
    "DiameterEstimate",
    "fit_profile",
    "beta_eval",
    "residues",
    "closed_form_beta",
    "diameter_via_beta",
    # distributions
    "DistanceDistribution",
    "KSResult",
    "ChordDistribution",
    "CroftonMoments",
    "interpoint_cdf",
    "two_sample_ks",
    "mellin_transform",
    "mellin_check",
    "chord_length_distribution",
    "crofton_moments",
    # constructions
    "CaelliConfig",
    "TwoSphereConfig",
    "TailEstimate",
    "caelli_pair",
    "default_caelli_config",
    "tail_volume_ratio",
    "single_sphere_tail",
    "single_sphere_tail_exact",
    "distance_tail",
    # identification
    "Budgets",
    "Fingerprint",
    "Check",
    "Verdict",
    "fingerprint",
    "classify",
    "radius_from_residue",
]

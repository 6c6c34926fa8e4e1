"""Heisenberg-group distances, checks of the Besicovitch covering argument and counterexample families."""

from .chain import (
    ChainFamily,
    ChainSpace,
    DepthError,
    MetricError,
    build_chain_counterexample,
    chain_distance,
    check_chain_space,
    theta_weight,
    verify_chain_family,
)
from .covering import (
    BesicovitchFamily,
    ConstructionError,
    FamilyReport,
    InvalidFamily,
    bound_report,
    ingoing_corner_family,
    outgoing_corner_family,
    reduce_family,
    search_max_family,
    verify_family,
)
from .group import ORIGIN, Point, dilate, inverse, multiply, project, reflect, rho, rotate_z
from .metrics import (
    Ball,
    BallNorm,
    Box,
    Gauge,
    KappaGauge,
    RhoPseudo,
    a_poly,
    ball_contains,
    derived_constants,
    distance,
    distance_by_bisection,
    norm,
    sphere_section,
)
from .regions import (
    ConeC,
    ConeSection,
    Disc,
    PRegion,
    Quad,
    Report,
    RSection,
    TRegion,
    quad_vertices,
    region_contains,
    threshold_search,
    verify_comparison,
    verify_inclusion,
)

__all__ = [name for name in dir() if not name.startswith("_")]

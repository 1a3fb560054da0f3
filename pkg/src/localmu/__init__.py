"""Numerical checks for extending isometries between open subsets of normed spaces.

Isometries defined on open connected (or star-shaped) sets are extended to
affine isometries of the whole space, and every identity along the way is
measured as a finite-sample defect.
"""

from .domains import (Domain, ball_union, closed_ball, cone_without_apex, cone_witness, contains,
                      custom, inradii, inradius_at, interior, interior_approach,
                      interior_convexity_defect, open_ball, openness_witness, polytope,
                      segment_set, star_defect, star_union, translate, union)
from .errors import (DimensionError, DomainError, LocalMUError, NonFiniteError,
                     PreconditionError, RankDeficientError, SamplingError)
from .extension import (DefectReport, ExtensionResult, extend, extend_convex, materialize,
                        recentre, run_extension, safe_radius, verify_extension)
from .fixtures import BUILTINS, Fixture, FixtureError, load_fixture
from .harness import RunConfig, RunReport, run
from .maps import (Affine, Analytic, Composite, MapModel, Piecewise, affine_fit, compose,
                   evaluate, invert, isometry_defect)
from .midpoint import (SphereSet, certify_midpoint, chain_midpoint_defect, choose_subdivision,
                       dyadic_chain, fixed_center_check, midpoint_defect, spacing_collapse_check)
from .spaces import (DEFAULT_TOL, Defect, Metric, NormedSpace, Tolerances, distance, l1_space,
                     l2_space, linf_space, lp_space, norm_eval, norm_metric, polyhedral_space,
                     reflect, segment_point, weighted_linf_space)

__version__ = "0.1.0"

__all__ = [
    "Affine",
    "affine_fit",
    "Analytic",
    "ball_union",
    "BUILTINS",
    "certify_midpoint",
    "chain_midpoint_defect",
    "choose_subdivision",
    "closed_ball",
    "compose",
    "Composite",
    "cone_without_apex",
    "cone_witness",
    "contains",
    "custom",
    "DEFAULT_TOL",
    "Defect",
    "DefectReport",
    "DimensionError",
    "distance",
    "Domain",
    "DomainError",
    "dyadic_chain",
    "evaluate",
    "extend",
    "extend_convex",
    "ExtensionResult",
    "fixed_center_check",
    "Fixture",
    "FixtureError",
    "inradii",
    "inradius_at",
    "interior",
    "interior_approach",
    "interior_convexity_defect",
    "invert",
    "isometry_defect",
    "l1_space",
    "l2_space",
    "linf_space",
    "load_fixture",
    "LocalMUError",
    "lp_space",
    "MapModel",
    "materialize",
    "Metric",
    "midpoint_defect",
    "NonFiniteError",
    "norm_eval",
    "norm_metric",
    "NormedSpace",
    "open_ball",
    "openness_witness",
    "Piecewise",
    "polyhedral_space",
    "polytope",
    "PreconditionError",
    "RankDeficientError",
    "recentre",
    "reflect",
    "run",
    "run_extension",
    "RunConfig",
    "RunReport",
    "safe_radius",
    "SamplingError",
    "segment_point",
    "segment_set",
    "spacing_collapse_check",
    "SphereSet",
    "star_defect",
    "star_union",
    "Tolerances",
    "translate",
    "union",
    "verify_extension",
    "weighted_linf_space",
]

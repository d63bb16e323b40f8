"""Curvature of left-invariant metrics along inverse-linear deformations."""

from .algebra import (
    LieAlgebra,
    Subalgebra,
    build_from_structure_constants,
    build_so3,
    build_so4,
    make_subalgebra,
    project,
)
from .curvature import assert_nonneg, min_curvature_search, puttmann_curvature
from .infinitesimal import check_inf_nonneg, check_rigidity, sample_commuting_pairs
from .paths import (
    InverseLinearPath,
    bracket_quantities,
    kappa_closed_form,
    kappa_direct,
    path_from_metric,
    path_from_psi,
    taylor_coefficients,
)
from .rescale import coefficient_relations, rescaled_deformation, verify_curve_relation
from .scaling import abelian_kappa, bracket_ratio_sup, max_stretch_check, nonabelian_kappa

__all__ = [
    "LieAlgebra",
    "Subalgebra",
    "InverseLinearPath",
    "build_so3",
    "build_so4",
    "build_from_structure_constants",
    "make_subalgebra",
    "project",
    "puttmann_curvature",
    "min_curvature_search",
    "assert_nonneg",
    "path_from_psi",
    "path_from_metric",
    "bracket_quantities",
    "taylor_coefficients",
    "kappa_closed_form",
    "kappa_direct",
    "check_inf_nonneg",
    "check_rigidity",
    "sample_commuting_pairs",
    "abelian_kappa",
    "nonabelian_kappa",
    "max_stretch_check",
    "bracket_ratio_sup",
    "rescaled_deformation",
    "coefficient_relations",
    "verify_curve_relation",
]

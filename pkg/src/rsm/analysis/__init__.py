"""Curvature, suboptimality bounds, bisection and executable lemma checks."""

from .bisection import (
    BisectionState,
    RegularizedSolution,
    bisection_lambda,
    regularized_min_removal,
    removal_table,
    threshold_by_scan,
)
from .bounds import (
    BoundReport,
    aposteriori_bound,
    apriori_bound,
    bound_value,
    greedy_reference,
    prefailure_bound,
    saturation_factor,
)
from .curvature import CurvatureReport, SetTable, kappa, total_curvature
from .lemmas import Violation, check_appendix_lemmas, check_sequence_lemmas, check_set_lemmas

__all__ = [
    "BisectionState",
    "BoundReport",
    "CurvatureReport",
    "RegularizedSolution",
    "SetTable",
    "Violation",
    "aposteriori_bound",
    "apriori_bound",
    "bisection_lambda",
    "bound_value",
    "check_appendix_lemmas",
    "check_sequence_lemmas",
    "check_set_lemmas",
    "greedy_reference",
    "kappa",
    "prefailure_bound",
    "regularized_min_removal",
    "removal_table",
    "saturation_factor",
    "threshold_by_scan",
    "total_curvature",
]

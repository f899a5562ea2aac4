"""A priori, a posteriori and pre-failure suboptimality bounds for RAM."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..core import Budgets, DegenerateInstanceError, GroundSets, ObjectiveHandle, SelectionSequence
from ..solver import EpisodeTrace, greedy_step
from .curvature import CurvatureReport

KINDS = (
    "apriori_sub",
    "apriori_nonsub",
    "aposteriori_sub",
    "aposteriori_nonsub",
    "prefailure_sub",
    "prefailure_nonsub",
)


def saturation_factor(k: float) -> float:
    """``(1 - e^{-k}) / k``, equal to 1 in the limit ``k -> 0``."""
    if k == 0:
        return 1.0
    return -math.expm1(-k) / k


@dataclass(frozen=True)
class BoundReport:
    kind: str
    value: float
    curvature_used: float
    ratio_numerator: float | None
    ratio_denominator: float | None
    t: int
    T: int
    certified: bool = True

    def recompute(self) -> float:
        return bound_value(
            self.kind, self.curvature_used, self.t, self.T, self.ratio_numerator, self.ratio_denominator
        )


def bound_value(kind: str, k: float, t: int, T: int, num: float | None = None, den: float | None = None) -> float:
    if kind == "apriori_sub":
        return saturation_factor(k) * (1 - k) if T == 1 else (1 - k) ** 4
    if kind == "apriori_nonsub":
        return (1 - k) ** 3 if T == 1 else (1 - k) ** 5
    if kind not in KINDS:
        raise ValueError(f"unknown bound kind {kind!r}")
    ratio = num / den
    if kind.endswith("_sub"):
        return saturation_factor(k) * ratio if t == 1 else ratio / (1 + k)
    return (1 - k) * ratio


def _curv(curvature) -> tuple[float, bool]:
    if isinstance(curvature, CurvatureReport):
        return curvature.value, curvature.certified
    return float(curvature), True


def apriori_bound(curvature, T: int, submodular: bool = True) -> BoundReport:
    k, certified = _curv(curvature)
    if not 0 <= k <= 1:
        raise ValueError(f"curvature must lie in [0, 1], got {k}")
    if T < 1:
        raise ValueError("T must be at least 1")
    kind = "apriori_sub" if submodular else "apriori_nonsub"
    return BoundReport(kind, bound_value(kind, k, T, T), k, None, None, T, T, certified)


def greedy_reference(
    obj: ObjectiveHandle,
    bait_sets: Sequence[frozenset],
    grounds: GroundSets,
    budgets: Budgets,
) -> SelectionSequence:
    """Failure-free online greedy run on ``V_t \\ S_{t,1}`` with ``alpha_t - beta_t`` picks."""
    M: SelectionSequence = ()
    for t, bait in enumerate(bait_sets, start=1):
        K = [v for v in grounds.step(t) if v not in bait]
        delta = budgets.alpha[t - 1] - budgets.beta[t - 1]
        M = M + (greedy_step(obj, M, K, delta),)
    return M


def _posterior_kind(prefix: str, submodular: bool) -> str:
    return f"{prefix}_{'sub' if submodular else 'nonsub'}"


def _ratio_bound(kind, obj, numerator, M, t, T, curvature) -> BoundReport:
    k, certified = _curv(curvature)
    den = obj.evaluate(tuple(M)[:t])
    if den <= 0:
        raise DegenerateInstanceError(f"f(M_1:{t}) = 0; the ratio is undefined")
    return BoundReport(kind, bound_value(kind, k, t, T, numerator, den), k, numerator, den, t, T, certified)


def aposteriori_bound(
    obj: ObjectiveHandle,
    trace: EpisodeTrace,
    t: int,
    M: SelectionSequence,
    curvature,
    submodular: bool = True,
) -> BoundReport:
    """Bound on ``f(A_1:t \\ B*_1:t) / f*_t`` once the removals up to ``t`` are known."""
    numerator = obj.evaluate(trace.survivors(t))
    kind = _posterior_kind("aposteriori", submodular)
    return _ratio_bound(kind, obj, numerator, M, t, len(trace.steps), curvature)


def prefailure_bound(
    obj: ObjectiveHandle,
    f_hat,
    t: int,
    T: int,
    M: SelectionSequence,
    curvature,
    submodular: bool = True,
) -> BoundReport:
    """Same as the a posteriori bound with ``f(A \\ B*)`` replaced by the
    bisection value ``f_hat_t(lambda_t)``, available before step ``t``'s removal.

    ``f_hat`` may be a number or a ``BisectionState``.
    """
    f_hat = float(getattr(f_hat, "f_hat", f_hat))
    kind = _posterior_kind("prefailure", submodular)
    return _ratio_bound(kind, obj, f_hat, M, t, T, curvature)

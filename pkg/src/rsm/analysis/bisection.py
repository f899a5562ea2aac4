"""Pre-failure machinery: the cardinality-penalized removal problem and the
bisection on its penalty weight."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from ..core import BudgetError, CapacityError, ObjectiveHandle, SelectionSequence, canonical, with_step

SUBSET_CAP = 1 << 20


@dataclass(frozen=True)
class RegularizedSolution:
    B_hat: frozenset
    f_hat: float
    objective_value: float


@dataclass
class BisectionState:
    l: float
    u: float
    lambda_t: float
    B_hat: frozenset
    f_hat: float
    epsilon: float
    u0: float
    iterations: int = 0
    visited: list = field(default_factory=list)  # (lambda, |B_hat(lambda)|) in visit order


def removal_table(obj: ObjectiveHandle, history: SelectionSequence, A_t) -> list[tuple[frozenset, int, float]]:
    """``(B, |B|, f(history, A_t \\ B))`` for every ``B`` subset of ``A_t``,
    ordered by size and then lexicographically by global id."""
    A_t = frozenset(A_t)
    if 1 << len(A_t) > SUBSET_CAP:
        raise CapacityError(f"2^{len(A_t)} removals exceed cap {SUBSET_CAP}")
    t = len(history) + 1
    ordered = canonical(A_t)
    rows = []
    for k in range(len(ordered) + 1):
        for B in combinations(ordered, k):
            B = frozenset(B)
            rows.append((B, k, obj.evaluate(with_step(history, t, A_t - B))))
    return rows


def _solve(table, lam: float) -> RegularizedSolution:
    if lam == 0:
        # Removing everything is always a minimizer at lambda = 0 for monotone f;
        # preferring it keeps |B_hat(0)| >= beta_t even when some elements add nothing.
        full = table[-1]
        return RegularizedSolution(full[0], full[2], full[2])
    best = table[0]
    best_obj = best[2] + lam * best[1]
    for row in table[1:]:
        val = row[2] + lam * row[1]
        if val < best_obj:
            best, best_obj = row, val
    return RegularizedSolution(best[0], best[2], best_obj)


def regularized_min_removal(
    obj: ObjectiveHandle, survivors_history: SelectionSequence, A_t, lam: float
) -> RegularizedSolution:
    """Exact minimizer of ``f(history, A_t \\ B) + lam |B|`` over all ``B`` in ``A_t``.

    Ties go to the smallest ``|B|``, then to the lexicographically smallest ``B``,
    except at ``lam == 0`` where ``B_hat = A_t``.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    return _solve(removal_table(obj, survivors_history, A_t), lam)


def bisection_lambda(
    obj: ObjectiveHandle,
    survivors_history: SelectionSequence,
    A_t,
    beta_t: int,
    u0: float | None = None,
    epsilon: float = 1e-6,
) -> BisectionState:
    """Bisect the penalty weight until the bracket is ``epsilon`` wide and
    return ``lambda_t = l``, whose minimizer removes at least ``beta_t``
    elements and therefore under-estimates the worst-case surviving value."""
    if beta_t < 1:
        raise BudgetError("bisection needs beta_t >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    table = removal_table(obj, survivors_history, A_t)
    if u0 is None:
        u0 = table[0][2] + 1.0
    if len(_solve(table, u0).B_hat) >= beta_t:
        raise ValueError(f"u0={u0} is too small: |B_hat(u0)| >= beta_t; enlarge u0")
    l, u = 0.0, float(u0)
    lam = (l + u) / 2
    state = BisectionState(l, u, lam, frozenset(), math.nan, epsilon, float(u0))
    while u - l > epsilon:
        size = len(_solve(table, lam).B_hat)
        state.visited.append((lam, size))
        if size < beta_t:
            u = lam
        else:
            l = lam
        lam = (l + u) / 2
        state.iterations += 1
    sol = _solve(table, l)
    state.l, state.u, state.lambda_t = l, u, l
    state.B_hat, state.f_hat = sol.B_hat, sol.f_hat
    return state


def threshold_by_scan(table, beta_t: int) -> float:
    """Smallest ``lambda >= 0`` at which the penalized minimizer drops below
    ``beta_t`` removals, from the per-size minima ``h_k``.

    ``|B_hat| < beta`` holds iff some ``k < beta`` satisfies
    ``h_k + lambda k <= h_j + lambda j`` for every ``j >= beta``.
    """
    h: dict[int, float] = {}
    for _, k, val in table:
        h[k] = min(val, h.get(k, math.inf))
    small = [k for k in h if k < beta_t]
    large = [j for j in h if j >= beta_t]
    if not large:
        return 0.0
    best = math.inf
    for k in small:
        need = max((h[k] - h[j]) / (j - k) for j in large)
        best = min(best, need)
    return max(0.0, best)

"""Removal models: exact worst case, greedy, and uniform random."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .core import BudgetError, CapacityError, ObjectiveHandle, SelectionSequence, canonical, with_step

ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class RemovalOutcome:
    removed: frozenset
    post_value: float | None


def _post(obj, history, A_t, B) -> float:
    t = len(history) + 1
    return obj.evaluate(with_step(history, t, A_t - B))


def worst_case_removal(
    obj: ObjectiveHandle,
    survivors_history: SelectionSequence,
    A_t: frozenset,
    beta_t: int,
    *,
    cap: int = ENUMERATION_CAP,
    **_,
) -> RemovalOutcome:
    """Exact minimizer of ``f(history, A_t \\ B)`` over all ``|B| <= beta_t``.

    Ties go to the lexicographically smallest removal in global-id order.
    """
    if beta_t < 0:
        raise BudgetError(f"beta_t={beta_t} must be non-negative")
    A_t = frozenset(A_t)
    k_max = min(beta_t, len(A_t))
    n_sets = sum(comb(len(A_t), k) for k in range(k_max + 1))
    if n_sets > cap:
        raise CapacityError(f"worst-case removal needs {n_sets} evaluations, cap is {cap}")
    ordered = canonical(A_t)
    best_key, best_B, best_val = None, frozenset(), np.inf
    for k in range(k_max + 1):
        for B in combinations(ordered, k):
            val = _post(obj, survivors_history, A_t, frozenset(B))
            key = tuple(e.global_id for e in B)
            if val < best_val or (val == best_val and key < best_key):
                best_key, best_B, best_val = key, frozenset(B), val
    return RemovalOutcome(best_B, float(best_val))


def greedy_removal(
    obj: ObjectiveHandle,
    survivors_history: SelectionSequence,
    A_t: frozenset,
    beta_t: int,
    **_,
) -> RemovalOutcome:
    """Remove ``beta_t`` elements one at a time, each minimizing the surviving value."""
    if not 0 <= beta_t <= len(A_t):
        raise BudgetError(f"beta_t={beta_t} must lie in [0, |A_t|={len(A_t)}]")
    A_t = frozenset(A_t)
    removed: frozenset = frozenset()
    value = None
    for _ in range(beta_t):
        best, value = None, np.inf
        for y in canonical(A_t - removed):
            val = _post(obj, survivors_history, A_t, removed | {y})
            if val < value:
                best, value = y, val
        removed = removed | {best}
    if value is None:
        value = _post(obj, survivors_history, A_t, removed)
    return RemovalOutcome(removed, float(value))


def random_removal(
    rng: np.random.Generator,
    A_t: frozenset,
    beta_t: int,
    obj: ObjectiveHandle | None = None,
    survivors_history: SelectionSequence = (),
    **_,
) -> RemovalOutcome:
    """Uniform ``beta_t``-subset of ``A_t``.

    ``post_value`` is filled in only when an objective is supplied.
    """
    if not 0 <= beta_t <= len(A_t):
        raise BudgetError(f"beta_t={beta_t} must lie in [0, |A_t|={len(A_t)}]")
    ordered = canonical(A_t)
    idx = rng.choice(len(ordered), size=beta_t, replace=False)
    removed = frozenset(ordered[i] for i in sorted(idx))
    post = None if obj is None else _post(obj, survivors_history, frozenset(A_t), removed)
    return RemovalOutcome(removed, post)


def _random_attack(*, obj, survivors_history, A_t, beta_t, rng, **_):
    # the episode records its own post-removal value; skip the extra oracle call
    return random_removal(rng, A_t, beta_t)


ATTACKERS = {
    "worst": worst_case_removal,
    "worst_case": worst_case_removal,
    "greedy": greedy_removal,
    "random": _random_attack,
}


def get_attacker(name: str):
    try:
        return ATTACKERS[name]
    except KeyError:
        raise ValueError(f"unknown attacker {name!r}; expected one of {sorted(ATTACKERS)}") from None

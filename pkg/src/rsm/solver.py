"""Defender algorithms: RAM, online greedy, random selection, and an
exhaustive minimax solver for tiny instances."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .core import (
    BudgetError,
    Budgets,
    CapacityError,
    ElementRef,
    GroundSets,
    ObjectiveHandle,
    SelectionSequence,
    canonical,
    with_step,
)

SELECTORS = ("ram", "greedy", "random")


@dataclass(frozen=True)
class StepPlan:
    S1: frozenset
    S2: frozenset
    calls: int = 0

    @property
    def A(self) -> frozenset:
        return self.S1 | self.S2


@dataclass(frozen=True)
class MinimaxResult:
    value: float
    optimal_first_move: frozenset
    node_count: int


@dataclass(frozen=True)
class StepRecord:
    S1: frozenset
    S2: frozenset
    A: frozenset
    B: frozenset
    survivors: frozenset
    value: float
    selector_calls: int
    attacker_calls: int


@dataclass
class EpisodeTrace:
    selector: str
    attacker: str
    seed: int | None
    steps: list[StepRecord] = field(default_factory=list)

    @property
    def oracle_calls_per_step(self) -> list[int]:
        return [s.selector_calls for s in self.steps]

    def survivors(self, t: int | None = None) -> SelectionSequence:
        """Surviving sets ``A_1 \\ B_1, ..., A_t \\ B_t``."""
        steps = self.steps if t is None else self.steps[:t]
        return tuple(s.survivors for s in steps)

    def removals(self) -> SelectionSequence:
        return tuple(s.B for s in self.steps)


def _greedy_fill(
    obj: ObjectiveHandle,
    history: SelectionSequence,
    t: int,
    candidates: Sequence[ElementRef],
    rounds: int,
) -> tuple[frozenset, int]:
    """``rounds`` greedy picks from ``candidates`` maximizing ``f(history, chosen + y)``."""
    start = obj.eval_count
    remaining = canonical(candidates)
    chosen: frozenset = frozenset()
    history = tuple(history)[: t - 1]
    for _ in range(rounds):
        best, best_val = None, -np.inf
        for y in remaining:
            val = obj.evaluate(with_step(history, t, chosen | {y}))
            if val > best_val:
                best, best_val = y, val
        chosen = chosen | {best}
        remaining.remove(best)
    return chosen, obj.eval_count - start


def ram_step(
    obj: ObjectiveHandle,
    survivors_history: SelectionSequence,
    V_t: Sequence[ElementRef],
    alpha_t: int,
    beta_t: int,
) -> StepPlan:
    """One step of RAM: a bait of the ``beta_t`` best singletons, then
    ``alpha_t - beta_t`` greedy picks conditioned on the surviving history."""
    if not 0 <= beta_t <= alpha_t <= len(V_t):
        raise BudgetError(f"need 0 <= beta <= alpha <= |V_t|, got {beta_t}, {alpha_t}, {len(V_t)}")
    t = len(survivors_history) + 1
    start = obj.eval_count
    ordered = canonical(V_t)
    singles = {v: obj.singleton(v)[0] for v in ordered}
    # stable sort keeps the smaller global_id first among equal values
    ranked = sorted(ordered, key=lambda v: -singles[v])
    S1 = frozenset(ranked[:beta_t])
    rest = [v for v in ordered if v not in S1]
    S2, _ = _greedy_fill(obj, survivors_history, t, rest, alpha_t - beta_t)
    return StepPlan(S1, S2, obj.eval_count - start)


def greedy_step(
    obj: ObjectiveHandle,
    prior_choices: SelectionSequence,
    K_t: Sequence[ElementRef],
    delta_t: int,
) -> frozenset:
    """Online greedy: ``delta_t`` picks from ``K_t`` conditioned on ``prior_choices``."""
    if not 0 <= delta_t <= len(K_t):
        raise BudgetError(f"delta_t={delta_t} must lie in [0, |K_t|={len(K_t)}]")
    t = len(prior_choices) + 1
    chosen, _ = _greedy_fill(obj, prior_choices, t, K_t, delta_t)
    return chosen


def random_step(rng: np.random.Generator, V_t: Sequence[ElementRef], alpha_t: int) -> frozenset:
    if not 0 <= alpha_t <= len(V_t):
        raise BudgetError(f"alpha_t={alpha_t} must lie in [0, |V_t|={len(V_t)}]")
    ordered = canonical(V_t)
    idx = rng.choice(len(ordered), size=alpha_t, replace=False)
    return frozenset(ordered[i] for i in sorted(idx))


def run_episode(
    obj: ObjectiveHandle,
    grounds: GroundSets,
    budgets: Budgets,
    selector: str,
    attacker: str | Callable,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> EpisodeTrace:
    """Play the sequential select/remove protocol for ``t = 1..T``.

    The selector only ever sees the surviving history; the attacker is
    called after ``A_t`` is fixed.
    """
    from .attacks import get_attacker

    budgets.validate(grounds)
    if selector not in SELECTORS:
        raise ValueError(f"unknown selector {selector!r}; expected one of {SELECTORS}")
    if rng is None:
        rng = np.random.default_rng(seed)
    attack = get_attacker(attacker) if isinstance(attacker, str) else attacker
    name = attacker if isinstance(attacker, str) else getattr(attacker, "__name__", "custom")
    trace = EpisodeTrace(selector, name, seed)
    history: SelectionSequence = ()
    for t in range(1, grounds.horizon + 1):
        V_t, a, b = grounds.step(t), budgets.alpha[t - 1], budgets.beta[t - 1]
        start = obj.eval_count
        if selector == "ram":
            plan = ram_step(obj, history, V_t, a, b)
        elif selector == "greedy":
            plan = StepPlan(frozenset(), greedy_step(obj, history, V_t, a))
        else:
            plan = StepPlan(frozenset(), random_step(rng, V_t, a))
        sel_calls = obj.eval_count - start
        start = obj.eval_count
        outcome = attack(obj=obj, survivors_history=history, A_t=plan.A, beta_t=b, rng=rng)
        att_calls = obj.eval_count - start
        survivors = plan.A - outcome.removed
        history = history + (survivors,)
        trace.steps.append(
            StepRecord(
                plan.S1,
                plan.S2,
                plan.A,
                outcome.removed,
                survivors,
                obj.evaluate(history),
                sel_calls,
                att_calls,
            )
        )
    return trace


def ram_call_limit(size: int, alpha: int, beta: int) -> int:
    """Oracle calls allowed per RAM step: ``|V_t| + (alpha_t - beta_t) |V_t|``."""
    return size + (alpha - beta) * size


def count_nodes(grounds: GroundSets, budgets: Budgets) -> int:
    from math import comb

    total, level = 0, 1
    for t in range(1, grounds.horizon + 1):
        a, b = budgets.alpha[t - 1], budgets.beta[t - 1]
        level *= comb(len(grounds.step(t)), a) * comb(a, b)
        total += level
    return total


def optimal_value(
    obj: ObjectiveHandle,
    grounds: GroundSets,
    budgets: Budgets,
    node_budget: int = 5_000_000,
) -> MinimaxResult:
    """Exact max-min value by depth-first recursion over ``(A_t, B_t)``.

    Removals are enumerated at size exactly ``beta_t``: for a monotone
    objective removing fewer never helps the attacker.
    """
    budgets.validate(grounds)
    estimate = count_nodes(grounds, budgets)
    if estimate > node_budget:
        raise CapacityError(f"instance needs {estimate} nodes, budget is {node_budget}")
    T = grounds.horizon
    steps = [canonical(grounds.step(t)) for t in range(1, T + 1)]
    nodes = 0

    def value(t: int, history: SelectionSequence) -> tuple[float, frozenset]:
        nonlocal nodes
        if t > T:
            return obj.evaluate(history), frozenset()
        a, b = budgets.alpha[t - 1], budgets.beta[t - 1]
        best, best_move = -np.inf, frozenset()
        for A in combinations(steps[t - 1], a):
            worst = np.inf
            for B in combinations(A, b):
                nodes += 1
                if nodes > node_budget:
                    raise CapacityError(f"node budget {node_budget} exceeded")
                survivors = frozenset(A) - frozenset(B)
                v, _ = value(t + 1, history + (survivors,))
                if v < worst:
                    worst = v
            if worst > best:
                best, best_move = worst, frozenset(A)
        return best, best_move

    v, move = value(1, ())
    return MinimaxResult(float(v), move, nodes)

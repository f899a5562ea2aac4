"""Executable checks of the supporting inequalities behind RAM's bounds.

Set inequalities (for disjoint ``A, B`` unless noted), with ``c = c_f``:

* ``union``: ``f(A u B) >= (1-c) [f(A) + f(B)]``
* ``union_singletons``: ``f(A u B) >= (1-c) [f(A) + sum_b f(b)]``
* ``exchange`` (``A - B`` non-empty): ``f(A) + (1-c) f(B) >= (1-c) f(A u B) + f(A n B)``
* ``singletons_cover``: ``f(A) + sum_b f(b) >= (1-c) f(A u B)``

Sequence inequalities on a RAM run against worst-case removals, with ``P``
the best selection from ``V_t - S_{t,1}`` of size ``<= alpha_t - beta_t``:

* ``greedy_vs_any``: ``f(S_{1,2}, ..., S_{T,2}) >= (1-c)^2 f(O)`` for every feasible ``O``
* ``reference_vs_best``: ``f(M) >= (1-c) f(P)``
* ``greedy_vs_best``: ``f(S_{1,2}, ..., S_{T,2}) >= (1-c)^3 f(P)``
* ``best_vs_minimax``: ``f(P) >= f*``
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from ..attacks import worst_case_removal
from ..core import Budgets, GroundSets, ObjectiveHandle, canonical
from ..solver import EpisodeTrace, optimal_value, run_episode
from .bounds import greedy_reference
from .curvature import SetTable

SET_LEMMAS = ("union", "union_singletons", "exchange", "singletons_cover")
SEQUENCE_LEMMAS = ("greedy_vs_any", "reference_vs_best", "greedy_vs_best", "best_vs_minimax")
EXHAUSTIVE_LIMIT = 8


@dataclass(frozen=True)
class Violation:
    lemma: str
    witness: tuple
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def _holds(lhs: float, rhs: float, tol: float = 1e-9) -> bool:
    return lhs >= rhs - tol * max(1.0, abs(lhs), abs(rhs))


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield 1 << i
        mask >>= 1
        i += 1


def _set_lemma(name: str, f: SetTable, A: int, B: int, c: float):
    """Return ``(lhs, rhs)`` of one set inequality at bitmasks ``A, B``."""
    if name == "union":
        return f(A | B), (1 - c) * (f(A) + f(B))
    singles = sum(f(b) for b in _bits(B))
    if name == "union_singletons":
        return f(A | B), (1 - c) * (f(A) + singles)
    if name == "exchange":
        return f(A) + (1 - c) * f(B), (1 - c) * f(A | B) + f(A & B)
    if name == "singletons_cover":
        return f(A) + singles, (1 - c) * f(A | B)
    raise ValueError(name)


def check_set_lemmas(
    obj: ObjectiveHandle,
    V,
    c_exact: float,
    trials: int = 10_000,
    rng: np.random.Generator | None = None,
    exhaustive: bool | None = None,
) -> tuple[list[Violation], int]:
    """Check the four set inequalities on ``trials`` random pairs per lemma,
    plus every pair when ``|V|`` is small.  Returns ``(violations, checks)``."""
    rng = np.random.default_rng(0) if rng is None else rng
    table = SetTable(obj, V)
    n = len(table.V)
    full = (1 << n) - 1
    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_LIMIT
    violations: list[Violation] = []
    checks = 0

    def check(name, A, B):
        nonlocal checks
        checks += 1
        lhs, rhs = _set_lemma(name, table, A, B, c_exact)
        if not _holds(lhs, rhs):
            violations.append(
                Violation(name, (tuple(table.elements(A)), tuple(table.elements(B))), lhs, rhs)
            )

    for name in SET_LEMMAS:
        for _ in range(trials):
            if name == "exchange":
                A = B = 0
                while not A & ~B & full:
                    A = int(rng.integers(1 << n))
                    B = int(rng.integers(1 << n))
            else:
                labels = rng.integers(3, size=n)  # 0: neither, 1: A, 2: B
                A = sum(1 << i for i in range(n) if labels[i] == 1)
                B = sum(1 << i for i in range(n) if labels[i] == 2)
            check(name, A, B)
    if exhaustive:
        for A in range(1 << n):
            rest = full & ~A
            B = rest
            while True:  # all B disjoint from A
                for name in ("union", "union_singletons", "singletons_cover"):
                    check(name, A, B)
                if B == 0:
                    break
                B = (B - 1) & rest
            for B in range(1 << n):
                if A & ~B:
                    check("exchange", A, B)
    return violations, checks


def _feasible_selections(grounds: GroundSets, bait_sets, budgets: Budgets):
    per_step = []
    for t in range(1, grounds.horizon + 1):
        K = canonical(v for v in grounds.step(t) if v not in bait_sets[t - 1])
        delta = budgets.alpha[t - 1] - budgets.beta[t - 1]
        per_step.append([frozenset(s) for k in range(delta + 1) for s in combinations(K, k)])
    return product(*per_step)


def check_sequence_lemmas(
    obj: ObjectiveHandle,
    grounds: GroundSets,
    budgets: Budgets,
    c_exact: float,
    trace: EpisodeTrace | None = None,
    f_star: float | None = None,
    node_budget: int = 5_000_000,
) -> tuple[list[Violation], int]:
    """Check the four sequence inequalities by exhaustive enumeration."""
    if trace is None:
        trace = run_episode(obj, grounds, budgets, "ram", worst_case_removal)
    bait = [s.S1 for s in trace.steps]
    S2 = tuple(s.S2 for s in trace.steps)
    f_S2 = obj.evaluate(S2)
    f_P, P = -np.inf, None
    for O in _feasible_selections(grounds, bait, budgets):
        val = obj.evaluate(O)
        if val > f_P:
            f_P, P = val, O
    M = greedy_reference(obj, bait, grounds, budgets)
    f_M = obj.evaluate(M)
    if f_star is None:
        f_star = optimal_value(obj, grounds, budgets, node_budget).value
    c = c_exact
    rows = [
        ("greedy_vs_any", (S2, P), f_S2, (1 - c) ** 2 * f_P),
        ("reference_vs_best", (M, P), f_M, (1 - c) * f_P),
        ("greedy_vs_best", (S2, P), f_S2, (1 - c) ** 3 * f_P),
        ("best_vs_minimax", (P,), f_P, f_star),
    ]
    violations = [Violation(n, w, lhs, rhs) for n, w, lhs, rhs in rows if not _holds(lhs, rhs)]
    return violations, len(rows)


def check_appendix_lemmas(
    obj: ObjectiveHandle,
    grounds: GroundSets,
    budgets: Budgets,
    c_exact: float,
    trials: int = 10_000,
    rng: np.random.Generator | None = None,
) -> list[Violation]:
    """All set and sequence inequalities; an empty list means no violation."""
    set_v, _ = check_set_lemmas(obj, grounds.all_elements(), c_exact, trials, rng)
    seq_v, _ = check_sequence_lemmas(obj, grounds, budgets, c_exact)
    return set_v + seq_v

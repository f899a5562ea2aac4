"""Exhaustive desk-scale verification of RAM's guarantees.

Every instance in the grid is solved exactly (minimax value, worst-case
removals, exact curvature) and each guarantee is checked against it.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from ..attacks import worst_case_removal
from ..core import Budgets, GroundSets, ObjectiveHandle
from ..objectives import CoverageSpec, ModularSpec, make_coverage, make_modular
from ..solver import optimal_value, ram_call_limit, run_episode
from .bisection import bisection_lambda, removal_table, threshold_by_scan
from .bounds import aposteriori_bound, apriori_bound, greedy_reference, prefailure_bound
from .curvature import kappa, total_curvature
from .lemmas import check_sequence_lemmas, check_set_lemmas

TOL = 1e-9


@dataclass(frozen=True)
class GridInstance:
    kind: str  # "coverage" or "modular"
    sizes: tuple[int, ...]
    alpha: int
    beta: int
    seed: int
    integer_weights: bool

    @property
    def label(self) -> str:
        return (
            f"{self.kind}|V|={self.sizes[0]},T={len(self.sizes)},a={self.alpha},b={self.beta},"
            f"seed={self.seed}"
        )

    def build(self) -> tuple[ObjectiveHandle, GroundSets, Budgets]:
        rng = np.random.default_rng([self.seed, len(self.sizes), self.sizes[0], self.alpha, self.beta])
        grounds = GroundSets.from_sizes(self.sizes)
        budgets = Budgets.uniform(self.alpha, self.beta, len(self.sizes))
        elems = grounds.all_elements()

        def weight():
            return float(rng.integers(1, 4)) if self.integer_weights else float(rng.uniform(0.5, 2.0))

        if self.kind == "modular":
            obj = make_modular(ModularSpec({e: weight() for e in elems}), grounds, cache=True)
        else:
            items = [f"u{i}" for i in range(6)]
            item_w = {u: weight() for u in items}
            covers = {}
            for e in elems:
                chosen = [u for u in items if rng.random() < 0.35]
                if not chosen:
                    chosen = [items[int(rng.integers(len(items)))]]
                covers[e] = frozenset(chosen)
            obj = make_coverage(CoverageSpec(item_w, covers), grounds, cache=True)
        return obj, grounds, budgets


def grid_instances(seeds: int = 24, sizes=(3, 4, 5), horizons=(1, 2), kinds=("coverage", "modular")) -> Iterator[GridInstance]:
    for kind in kinds:
        for n in sizes:
            for T in horizons:
                for alpha in range(1, n + 1):
                    for beta in range(alpha + 1):
                        for seed in range(seeds):
                            yield GridInstance(kind, (n,) * T, alpha, beta, seed, seed % 2 == 0)


@dataclass
class GridReport:
    instances: int = 0
    checks: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)

    def fail(self, check: str, label: str, detail: str) -> None:
        self.violations.append((check, label, detail))

    def count(self, check: str, ok: bool, label: str, detail: str = "") -> None:
        self.checks[check] += 1
        if not ok:
            self.fail(check, label, detail)

    def failures(self, check: str) -> list:
        return [v for v in self.violations if v[0] == check]

    def merge(self, other: "GridReport") -> None:
        self.instances += other.instances
        self.checks.update(other.checks)
        self.skipped.update(other.skipped)
        self.violations.extend(other.violations)

    def summary_lines(self) -> list[str]:
        lines = [f"instances: {self.instances}"]
        for name in sorted(self.checks):
            bad = len(self.failures(name))
            lines.append(f"{name}: {self.checks[name]} checks, {bad} violations")
        for name in sorted(self.skipped):
            lines.append(f"{name}: {self.skipped[name]} skipped (degenerate ratio)")
        return lines


def _geq(lhs: float, rhs: float) -> bool:
    return lhs >= rhs - TOL * max(1.0, abs(lhs), abs(rhs))


def check_instance(
    inst: GridInstance,
    epsilon: float = 1e-6,
    lemma_trials: int = 0,
    report: GridReport | None = None,
) -> GridReport:
    report = GridReport() if report is None else report
    report.instances += 1
    label = inst.label
    obj, grounds, budgets = inst.build()
    T = grounds.horizon

    trace = run_episode(obj, grounds, budgets, "ram", worst_case_removal)
    for t, step in enumerate(trace.steps, start=1):
        limit = ram_call_limit(len(grounds.step(t)), budgets.alpha[t - 1], budgets.beta[t - 1])
        report.count("ram_call_accounting", step.selector_calls <= limit, label,
                     f"t={t}: {step.selector_calls} > {limit}")

    k = kappa(obj)
    c = total_curvature(obj, mode="exact")
    report.count("curvature_identity", abs(c.value - k.value) <= 1e-9, label, f"c={c.value}, kappa={k.value}")

    f_star = [optimal_value(obj, grounds.truncated(t), budgets.truncated(t)).value for t in range(1, T + 1)]
    f_ram = trace.steps[-1].value

    for sub, curv in ((True, k), (False, c)):
        b = apriori_bound(curv, T, submodular=sub)
        report.count(b.kind, _geq(f_ram, b.value * f_star[-1]), label,
                     f"f={f_ram}, bound={b.value}, f*={f_star[-1]}")
    if inst.kind == "modular":
        report.count("modular_optimality", f_ram == f_star[-1], label, f"f={f_ram!r}, f*={f_star[-1]!r}")

    M = greedy_reference(obj, [s.S1 for s in trace.steps], grounds, budgets)
    for t in range(1, T + 1):
        value_t = trace.steps[t - 1].value
        denominator = obj.evaluate(M[:t])
        beta_t = budgets.beta[t - 1]
        f_hat = value_t
        if beta_t >= 1:
            history, A_t = trace.survivors(t - 1), trace.steps[t - 1].A
            state = bisection_lambda(obj, history, A_t, beta_t, epsilon=epsilon)
            f_hat = state.f_hat
            report.count("prefailure_lemma", _geq(value_t, f_hat), label, f"t={t}: f_hat={f_hat} > {value_t}")
            report.count("bisection_lower_bracket", len(state.B_hat) >= beta_t, label,
                         f"t={t}: |B_hat(l)|={len(state.B_hat)} < {beta_t}")
            lam_star = threshold_by_scan(removal_table(obj, history, A_t), beta_t)
            report.count("bisection_threshold", abs(state.lambda_t - lam_star) <= epsilon, label,
                         f"t={t}: lambda={state.lambda_t}, scan={lam_star}")
            sizes = [s for _, s in sorted(state.visited)]
            report.count("bisection_monotone", all(a >= b for a, b in zip(sizes, sizes[1:])), label, str(state.visited))
            limit = math.ceil(math.log2(state.u0 / epsilon))
            report.count("bisection_iterations", state.iterations <= limit, label, f"{state.iterations} > {limit}")
        if denominator <= 0:
            report.skipped["aposteriori"] += 1
            continue
        for sub, curv in ((True, k), (False, c)):
            post = aposteriori_bound(obj, trace, t, M, curv, submodular=sub)
            report.count(post.kind, _geq(value_t, post.value * f_star[t - 1]), label,
                         f"t={t}: f={value_t}, bound={post.value}, f*_t={f_star[t - 1]}")
            pre = prefailure_bound(obj, f_hat, t, T, M, curv, submodular=sub)
            report.count(pre.kind, _geq(value_t, pre.value * f_star[t - 1]) and pre.value <= post.value + TOL,
                         label, f"t={t}: pre={pre.value}, post={post.value}")

    seq_v, _ = check_sequence_lemmas(obj, grounds, budgets, c.value, trace=trace, f_star=f_star[-1])
    report.count("sequence_lemmas", not seq_v, label, repr(seq_v))
    if lemma_trials:
        set_v, _ = check_set_lemmas(obj, grounds.all_elements(), c.value, lemma_trials,
                                    np.random.default_rng(inst.seed), exhaustive=False)
        report.count("set_lemmas", not set_v, label, repr(set_v[:3]))
    return report


def run_grid(
    instances=None,
    epsilon: float = 1e-6,
    lemma_trials: int = 0,
    progress: Callable[[int], None] | None = None,
) -> GridReport:
    report = GridReport()
    for i, inst in enumerate(grid_instances() if instances is None else instances):
        check_instance(inst, epsilon, lemma_trials, report)
        if progress is not None:
            progress(i)
    return report

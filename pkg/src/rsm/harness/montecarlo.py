"""Monte Carlo orchestration over independent trials.

Seeds: trial ``i`` of master seed ``s`` generates its scenario from
``SeedSequence([s, i, 0])`` and runs the pair ``(selector, attacker)`` with
``SeedSequence([s, i, 1, selector_index, attacker_index])``, indices taken in
the fixed orders ``SELECTORS`` and ``ATTACKER_ORDER``.  Adding trials, selectors
or attackers therefore never changes the numbers of the others.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..attacks import ATTACKERS, worst_case_removal
from ..core import CapacityError, DegenerateInstanceError, RSMError
from ..solver import SELECTORS, EpisodeTrace, run_episode
from ..analysis.bisection import bisection_lambda
from ..analysis.bounds import aposteriori_bound, apriori_bound, greedy_reference, prefailure_bound
from ..analysis.curvature import EXACT_CAP, kappa, total_curvature
from .config import ScenarioConfig
from .results import ResultRow
from .scenarios import Scenario, build_scenario

ATTACKER_ORDER = tuple(sorted(ATTACKERS))
WORKERS_ENV = "RSM_WORKERS"


def scenario_seed(master: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master, trial, 0])


def episode_seed(master: int, trial: int, selector: str, attacker: str) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        [master, trial, 1, SELECTORS.index(selector), ATTACKER_ORDER.index(attacker)]
    )


def make_scenario(config: ScenarioConfig, trial: int) -> Scenario:
    seed = np.random.default_rng(scenario_seed(config.seed, trial))
    return build_scenario(config.kind, seed, config.params, config.horizon, config.alpha, config.beta)


def _attacker(config: ScenarioConfig, name: str):
    if ATTACKERS[name] is worst_case_removal:
        cap = config.enumeration_cap

        def worst(**kw):
            return worst_case_removal(cap=cap, **kw)

        worst.__name__ = name
        return worst
    return name


def curvature_for(scenario: Scenario, config: ScenarioConfig, rng: np.random.Generator):
    """Curvature used by the bounds: exact ``kappa`` for submodular objectives,
    ``c_f`` otherwise (exact when small enough, sampled and uncertified beyond)."""
    obj = scenario.obj
    if obj.submodular:
        return kappa(obj)
    if len(scenario.grounds.all_elements()) <= EXACT_CAP:
        return total_curvature(obj, mode="exact")
    return total_curvature(obj, mode="sampled", sample_budget=config.curvature_samples, rng=rng)


@dataclass(frozen=True)
class StepBounds:
    apriori: float | None
    aposteriori: list
    prefailure: list


def episode_bounds(scenario: Scenario, trace: EpisodeTrace, curvature, epsilon: float = 1e-6) -> StepBounds:
    """Per-step bound values for a RAM run under worst-case removals.

    Entries are ``None`` where a ratio is undefined (``f(M_1:t) = 0``) or an
    enumeration would exceed its cap.
    """
    obj, grounds, budgets = scenario.obj, scenario.grounds, scenario.budgets
    T = grounds.horizon
    sub = obj.submodular
    apriori = apriori_bound(curvature, T, submodular=sub).value
    M = greedy_reference(obj, [s.S1 for s in trace.steps], grounds, budgets)
    post, pre = [], []
    for t in range(1, T + 1):
        try:
            post.append(aposteriori_bound(obj, trace, t, M, curvature, submodular=sub).value)
        except DegenerateInstanceError:
            post.append(None)
            pre.append(None)
            continue
        beta_t = budgets.beta[t - 1]
        try:
            if beta_t >= 1:
                f_hat = bisection_lambda(
                    obj, trace.survivors(t - 1), trace.steps[t - 1].A, beta_t, epsilon=epsilon
                ).f_hat
            else:
                f_hat = trace.steps[t - 1].value
            pre.append(prefailure_bound(obj, f_hat, t, T, M, curvature, submodular=sub).value)
        except CapacityError:
            pre.append(None)
    return StepBounds(apriori, post, pre)


def run_trial(config: ScenarioConfig, trial: int) -> tuple[list[ResultRow], list[tuple]]:
    """All requested (selector, attacker) episodes of one trial."""
    rows: list[ResultRow] = []
    failures: list[tuple] = []
    try:
        scenario = make_scenario(config, trial)
    except RSMError as exc:
        return rows, [(trial, "*", "*", f"{type(exc).__name__}: {exc}")]
    obj = scenario.obj
    for selector in config.selectors:
        for attacker in config.attackers:
            rng = np.random.default_rng(episode_seed(config.seed, trial, selector, attacker))
            try:
                trace = run_episode(
                    obj, scenario.grounds, scenario.budgets, selector, _attacker(config, attacker), rng=rng
                )
                bounds = None
                if config.bounds and selector == "ram" and ATTACKERS[attacker] is worst_case_removal:
                    bounds = episode_bounds(scenario, trace, curvature_for(scenario, config, rng), config.epsilon)
            except (CapacityError, DegenerateInstanceError) as exc:
                failures.append((trial, selector, attacker, f"{type(exc).__name__}: {exc}"))
                continue
            for t, step in enumerate(trace.steps, start=1):
                rows.append(
                    ResultRow(
                        trial,
                        selector,
                        attacker,
                        t,
                        obj.empty_cost(t) - step.value,
                        step.value,
                        None if bounds is None else bounds.apriori,
                        None if bounds is None else bounds.aposteriori[t - 1],
                        None if bounds is None else bounds.prefailure[t - 1],
                        step.selector_calls,
                    )
                )
    return rows, failures


@dataclass(frozen=True)
class StepSummary:
    mean_error: float
    stderr: float
    n: int
    mean_f: float


@dataclass
class MonteCarloResult:
    config: ScenarioConfig
    rows: list[ResultRow]
    failures: list[tuple] = field(default_factory=list)

    def summary(self) -> dict[tuple[str, str, int], StepSummary]:
        """Per ``(selector, attacker, step)`` mean error and its standard error."""
        groups: dict[tuple[str, str, int], list[ResultRow]] = {}
        for row in self.rows:
            groups.setdefault((row.selector, row.attacker, row.step), []).append(row)
        out = {}
        for key, rows in sorted(groups.items()):
            errs = np.array([r.error for r in rows])
            n = len(errs)
            se = float(errs.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
            out[key] = StepSummary(math.fsum(errs) / n, se, n, math.fsum(r.f_value for r in rows) / n)
        return out

    def mean_errors(self, selector: str, attacker: str) -> list[float]:
        s = self.summary()
        return [s[k].mean_error for k in sorted(s) if k[:2] == (selector, attacker)]


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer")
    return n


def run_monte_carlo(config: ScenarioConfig, workers: int | None = None) -> MonteCarloResult:
    """Run every trial and merge rows in trial order regardless of completion order."""
    workers = worker_count() if workers is None else workers
    trials = range(config.trials)
    if workers == 1 or config.trials == 1:
        outputs = [run_trial(config, i) for i in trials]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, config.trials)) as pool:
            outputs = list(pool.map(run_trial, [config] * config.trials, trials))
    rows, failures = [], []
    for r, f in outputs:
        rows.extend(r)
        failures.extend(f)
    return MonteCarloResult(config, rows, failures)

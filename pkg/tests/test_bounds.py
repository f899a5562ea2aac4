import math

import numpy as np
import pytest

from conftest import random_coverage
from rsm import Budgets, DegenerateInstanceError, run_episode
from rsm.analysis import (
    aposteriori_bound,
    apriori_bound,
    bisection_lambda,
    bound_value,
    greedy_reference,
    kappa,
    prefailure_bound,
    saturation_factor,
    total_curvature,
)
from rsm.analysis.curvature import CurvatureReport


def test_apriori_examples():
    # [TRIVIAL] closed forms
    assert apriori_bound(0.0, 1).value == 1.0
    assert apriori_bound(0.5, 1).value == pytest.approx(0.393469340287, abs=1e-12)
    assert apriori_bound(0.5, 2, submodular=False).value == 0.03125
    assert apriori_bound(0.5, 1, submodular=False).value == 0.125
    assert apriori_bound(0.5, 3).value == 0.0625


def test_apriori_rejects_bad_input():
    # [TRIVIAL]
    with pytest.raises(ValueError):
        apriori_bound(1.5, 1)
    with pytest.raises(ValueError):
        apriori_bound(0.5, 0)


def test_saturation_factor_limits():
    # [PAPER] the factor tends to 1 as kappa -> 0 and is at least 1 - 1/e
    assert saturation_factor(0.0) == 1.0
    assert saturation_factor(1e-12) == pytest.approx(1.0)
    assert saturation_factor(1.0) == pytest.approx(1 - math.exp(-1))


def test_greedy_reference_coverage_example(cover3):
    # [DERIVED] K = {b, c}, one pick -> b
    obj, g, (a, b, c) = cover3
    M = greedy_reference(obj, [frozenset({a})], g, Budgets.uniform(2, 1, 1))
    assert M == (frozenset({b}),)


def test_aposteriori_coverage_example(cover3):
    # [DERIVED] survivors value 2, f(M_1) = 2, kappa = 1 -> 1 - 1/e
    obj, g, _ = cover3
    b = Budgets.uniform(2, 1, 1)
    trace = run_episode(obj, g, b, "ram", "worst")
    M = greedy_reference(obj, [s.S1 for s in trace.steps], g, b)
    rep = aposteriori_bound(obj, trace, 1, M, kappa(obj))
    assert rep.value == pytest.approx(1 - 1 / math.e, abs=1e-15)
    assert rep.ratio_numerator == 2.0 and rep.ratio_denominator == 2.0
    assert rep.value == rep.recompute()


def test_aposteriori_kappa_one_branch():
    # [PAPER] kappa = 1, t > 1 -> f(A \ B*) / (2 f(M))
    assert bound_value("aposteriori_sub", 1.0, 2, 2, 3.0, 4.0) == 3.0 / 8.0


def test_aposteriori_ratio_one_when_removals_hit_bait():
    # [PAPER] ratio 1 and bound 1/(1+kappa) once every removal hits the bait
    found = 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        obj, g = random_coverage(rng, [5, 5], universe=8, p=0.3)
        b = Budgets.uniform(3, 1, 2)
        trace = run_episode(obj, g, b, "ram", "worst")
        if not all(s.B == s.S1 for s in trace.steps):
            continue
        M = greedy_reference(obj, [s.S1 for s in trace.steps], g, b)
        k = kappa(obj)
        rep = aposteriori_bound(obj, trace, 2, M, k)
        assert rep.ratio_numerator == rep.ratio_denominator
        assert rep.value == pytest.approx(1 / (1 + k.value), abs=1e-15)
        found += 1
    assert found > 0


def test_degenerate_ratio_raises(cover3):
    # [TRIVIAL] alpha = beta leaves M empty
    obj, g, _ = cover3
    b = Budgets.uniform(2, 2, 1)
    trace = run_episode(obj, g, b, "ram", "worst")
    M = greedy_reference(obj, [s.S1 for s in trace.steps], g, b)
    with pytest.raises(DegenerateInstanceError):
        aposteriori_bound(obj, trace, 1, M, kappa(obj))


def test_sampled_curvature_marks_reports_uncertified(cover3):
    # [TRIVIAL]
    obj, g, _ = cover3
    sampled = total_curvature(obj, mode="sampled", sample_budget=10)
    assert not apriori_bound(sampled, 1, submodular=False).certified
    assert apriori_bound(CurvatureReport(0.2, "total", "exact"), 1).certified


def test_prefailure_examples(mod321):
    # kappa = 0 at t = 1 leaves f_hat / f(M): [TRIVIAL]; f_hat from bisection: [DERIVED]
    obj, g, (a, b, c) = mod321
    budgets = Budgets.uniform(3, 1, 1)
    trace = run_episode(obj, g, budgets, "ram", "worst")
    M = greedy_reference(obj, [s.S1 for s in trace.steps], g, budgets)
    state = bisection_lambda(obj, (), trace.steps[0].A, 1, u0=10)
    pre = prefailure_bound(obj, state, 1, 1, M, 0.0)
    post = aposteriori_bound(obj, trace, 1, M, 0.0)
    assert pre.value == state.f_hat / obj(M)
    assert pre.value <= post.value
    assert pre.ratio_numerator == state.f_hat


@pytest.mark.parametrize("seed", range(15))
def test_prefailure_never_exceeds_aposteriori(seed):
    # [TRIVIAL] f_hat <= f(A \ B*) makes the substitution monotone
    rng = np.random.default_rng(seed)
    obj, g = random_coverage(rng, [5, 5])
    b = Budgets.uniform(3, 1, 2)
    trace = run_episode(obj, g, b, "ram", "worst")
    M = greedy_reference(obj, [s.S1 for s in trace.steps], g, b)
    k = kappa(obj)
    for t in (1, 2):
        state = bisection_lambda(obj, trace.survivors(t - 1), trace.steps[t - 1].A, 1)
        for sub in (True, False):
            pre = prefailure_bound(obj, state.f_hat, t, 2, M, k, submodular=sub)
            post = aposteriori_bound(obj, trace, t, M, k, submodular=sub)
            assert pre.value <= post.value
            assert pre.value == pre.recompute() and post.value == post.recompute()

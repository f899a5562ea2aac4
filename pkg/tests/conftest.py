"""Shared tiny instances used across the test modules."""

import numpy as np
import pytest

from rsm import Budgets, CoverageSpec, GroundSets, ModularSpec, make_coverage, make_modular
from rsm.objectives import LinearGaussianModel, Sensor


def abc():
    g = GroundSets.from_sizes([3])
    return g, g.step(1)


@pytest.fixture
def cover3():
    """Unit-weight coverage: a->{u1,u2}, b->{u2,u3}, c->{u3}."""
    g, (a, b, c) = abc()
    spec = CoverageSpec({"u1": 1, "u2": 1, "u3": 1}, {a: {"u1", "u2"}, b: {"u2", "u3"}, c: {"u3"}})
    return make_coverage(spec, g), g, (a, b, c)


@pytest.fixture
def mod321():
    """Modular weights a:3, b:2, c:1."""
    g, (a, b, c) = abc()
    return make_modular(ModularSpec({a: 3.0, b: 2.0, c: 1.0}), g), g, (a, b, c)


def random_coverage(rng, sizes, universe=6, p=0.4, integer=False, cache=False):
    g = GroundSets.from_sizes(sizes)
    items = [f"u{i}" for i in range(universe)]
    w = {u: float(rng.integers(1, 4)) if integer else float(rng.uniform(0.5, 2)) for u in items}
    covers = {}
    for e in g.all_elements():
        chosen = [u for u in items if rng.random() < p] or [items[int(rng.integers(universe))]]
        covers[e] = frozenset(chosen)
    return make_coverage(CoverageSpec(w, covers), g, cache=cache), g


def random_model(rng, n=2, T=2, sensors=3, m=1):
    """Random linear-Gaussian model with PD noise and well-conditioned dynamics."""
    F = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    A = rng.standard_normal((n, n))
    Q = A @ A.T / n + 0.2 * np.eye(n)
    B = rng.standard_normal((n, n))
    S0 = B @ B.T / n + 0.5 * np.eye(n)
    banks = []
    for _ in range(T):
        bank = []
        for _ in range(sensors):
            C = rng.standard_normal((m, n))
            D = rng.standard_normal((m, m))
            bank.append(Sensor(C, D @ D.T + 0.3 * np.eye(m)))
        banks.append(bank)
    return LinearGaussianModel(F, Q, S0, banks), GroundSets.from_sizes([sensors] * T)


def uniform(alpha, beta, T=1):
    return Budgets.uniform(alpha, beta, T)

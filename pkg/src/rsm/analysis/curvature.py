"""Curvature and total curvature of normalized monotone set functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import CapacityError, DegenerateInstanceError, ElementRef, ObjectiveHandle, canonical

EXACT_CAP = 10


@dataclass(frozen=True)
class CurvatureReport:
    value: float
    kind: str  # "kappa" or "total"
    mode: str  # "exact" or "sampled"
    sample_count: int = 0

    @property
    def certified(self) -> bool:
        return self.mode == "exact"


class SetTable:
    """Lazy ``f`` values over subsets of a fixed element list, keyed by bitmask.

    Sets are evaluated as flat selections padded to the objective's horizon.
    """

    def __init__(self, obj: ObjectiveHandle, V: Sequence[ElementRef]):
        self.obj = obj
        self.V = canonical(V)
        self._values: dict[int, float] = {0: 0.0}

    def elements(self, mask: int) -> list[ElementRef]:
        return [e for i, e in enumerate(self.V) if mask >> i & 1]

    def __call__(self, mask: int) -> float:
        v = self._values.get(mask)
        if v is None:
            v = self.obj.value_of_set(self.elements(mask))
            self._values[mask] = v
        return v

    def fill(self) -> None:
        for mask in range(1 << len(self.V)):
            self(mask)


def _clip(x: float) -> float:
    return float(min(1.0, max(0.0, x)))


def kappa(obj: ObjectiveHandle, V: Sequence[ElementRef] | None = None) -> CurvatureReport:
    """Exact curvature ``1 - min_v [f(V) - f(V - v)] / f(v)``.

    Uses ``2|V| + 1`` oracle calls.
    """
    V = canonical(obj.grounds.all_elements() if V is None else V)
    full = obj.value_of_set(V)
    worst = np.inf
    for v in V:
        single = obj.value_of_set([v])
        if single <= 0:
            raise DegenerateInstanceError(
                f"f({{{v}}}) = 0; drop zero-value elements before computing curvature"
            )
        without = obj.value_of_set([e for e in V if e != v])
        worst = min(worst, (full - without) / single)
    return CurvatureReport(_clip(1.0 - worst), "kappa", "exact")


def _ratio(num: float, den: float) -> float | None:
    if den <= 0:
        return None
    return max(num, 0.0) / den


def total_curvature(
    obj: ObjectiveHandle,
    V: Sequence[ElementRef] | None = None,
    mode: str = "exact",
    sample_budget: int = 1000,
    rng: np.random.Generator | None = None,
    cap: int = EXACT_CAP,
) -> CurvatureReport:
    """Total curvature ``1 - min_v min_{A,B} f(v|A) / f(v|B)``.

    The exact mode tabulates ``f`` on all subsets: for each ``v`` the ratio is
    minimized by the smallest numerator and the largest denominator, so no
    triple enumeration is needed.  Zero denominators are skipped; a zero
    numerator against a positive denominator gives ``c_f = 1``.

    The sampled mode draws ``sample_budget`` random triples and can only
    miss small ratios, so it under-estimates ``c_f`` and is uncertified.
    """
    V = canonical(obj.grounds.all_elements() if V is None else V)
    n = len(V)
    if mode == "exact":
        if n > cap:
            raise CapacityError(f"exact total curvature over {n} elements exceeds cap {cap}")
        table = SetTable(obj, V)
        table.fill()
        worst = np.inf
        for i in range(n):
            bit = 1 << i
            gains = [table(m | bit) - table(m) for m in range(1 << n) if not m & bit]
            r = _ratio(min(gains), max(gains))
            if r is not None:
                worst = min(worst, r)
        value = 0.0 if worst == np.inf else _clip(1.0 - worst)
        return CurvatureReport(value, "total", "exact")
    if mode != "sampled":
        raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if rng is None:
        rng = np.random.default_rng(0)
    worst = np.inf
    for _ in range(sample_budget):
        i = int(rng.integers(n))
        others = [e for j, e in enumerate(V) if j != i]
        A, B = (_random_subset(rng, others) for _ in range(2))
        v = V[i]
        num = obj.value_of_set(A + [v]) - obj.value_of_set(A)
        den = obj.value_of_set(B + [v]) - obj.value_of_set(B)
        r = _ratio(num, den)
        if r is not None:
            worst = min(worst, r)
    value = 0.0 if worst == np.inf else _clip(1.0 - worst)
    return CurvatureReport(value, "total", "sampled", sample_budget)


def _random_subset(rng: np.random.Generator, pool: list) -> list:
    size = int(rng.integers(len(pool) + 1))
    idx = rng.choice(len(pool), size=size, replace=False)
    return [pool[j] for j in sorted(idx)]

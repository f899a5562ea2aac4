"""Ground sets, budgets, selection sequences and the objective oracle.

A selection sequence is a tuple of frozensets ``(X_1, ..., X_l)`` whose
``t``-th entry only holds elements of step ``t``.  Trailing steps that are
not listed are treated as empty.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence


class RSMError(Exception):
    """Base class for all library errors."""


class StructuralError(RSMError, ValueError):
    """A sequence or set does not fit the declared ground sets."""


class ObjectiveContractError(RSMError, ValueError):
    """The evaluator returned NaN or a negative value."""


class BudgetError(RSMError, ValueError):
    """Budgets violate ``0 <= beta_t <= alpha_t <= |V_t|``."""


class CapacityError(RSMError, RuntimeError):
    """An exhaustive routine would exceed its configured budget."""


class NumericalError(RSMError, ArithmeticError):
    """A factorization or inversion failed."""


class DegenerateInstanceError(RSMError, ValueError):
    """A ratio in a bound has a zero denominator."""


class ElementRef(NamedTuple):
    """One selectable item.

    Field order makes tuple comparison follow ``global_id``, which is the
    canonical order used for every tie-break in the library.
    """

    global_id: int
    step: int
    local_index: int


SelectionSequence = tuple  # tuple[frozenset[ElementRef], ...]


def canonical(elements: Iterable[ElementRef]) -> list[ElementRef]:
    return sorted(elements, key=lambda e: e.global_id)


@dataclass(frozen=True)
class GroundSets:
    """Per-step ground sets ``V_1, ..., V_T`` with disjoint global ids."""

    per_step: tuple[tuple[ElementRef, ...], ...]
    _members: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.per_step:
            raise StructuralError("horizon must be positive")
        seen: set[int] = set()
        for t, elems in enumerate(self.per_step, start=1):
            if not elems:
                raise StructuralError(f"ground set at step {t} is empty")
            for e in elems:
                if e.step != t:
                    raise StructuralError(f"{e} listed under step {t}")
                if e.global_id in seen:
                    raise StructuralError(f"duplicate global_id {e.global_id}")
                seen.add(e.global_id)
        object.__setattr__(self, "_members", frozenset(e for s in self.per_step for e in s))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "GroundSets":
        per_step = []
        gid = 0
        for t, n in enumerate(sizes, start=1):
            per_step.append(tuple(ElementRef(gid + i, t, i) for i in range(n)))
            gid += n
        return cls(tuple(per_step))

    @property
    def horizon(self) -> int:
        return len(self.per_step)

    def step(self, t: int) -> tuple[ElementRef, ...]:
        return self.per_step[t - 1]

    def all_elements(self) -> list[ElementRef]:
        return [e for s in self.per_step for e in s]

    def __contains__(self, e) -> bool:
        return e in self._members

    def truncated(self, t: int) -> "GroundSets":
        return GroundSets(self.per_step[:t])


@dataclass(frozen=True)
class Budgets:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    @classmethod
    def uniform(cls, alpha: int, beta: int, horizon: int) -> "Budgets":
        return cls((alpha,) * horizon, (beta,) * horizon)

    def validate(self, grounds: GroundSets) -> None:
        if len(self.alpha) != grounds.horizon or len(self.beta) != grounds.horizon:
            raise BudgetError("budget length does not match the horizon")
        for t, (a, b) in enumerate(zip(self.alpha, self.beta), start=1):
            if not 0 <= b <= a <= len(grounds.step(t)):
                raise BudgetError(
                    f"step {t}: need 0 <= beta <= alpha <= |V_t|, got beta={b}, "
                    f"alpha={a}, |V_t|={len(grounds.step(t))}"
                )

    def truncated(self, t: int) -> "Budgets":
        return Budgets(self.alpha[:t], self.beta[:t])


def make_sequence(*sets: Iterable[ElementRef]) -> SelectionSequence:
    return tuple(frozenset(s) for s in sets)


def flatten(seq: SelectionSequence) -> frozenset:
    if len(seq) == 1:
        return seq[0]
    return frozenset().union(*seq)


def pad(seq: SelectionSequence, length: int) -> SelectionSequence:
    if len(seq) >= length:
        return seq
    return tuple(seq) + (frozenset(),) * (length - len(seq))


def sequence_from_set(elements: Iterable[ElementRef], length: int) -> SelectionSequence:
    """Split a flat element set into a per-step sequence of the given length."""
    buckets: list[set] = [set() for _ in range(length)]
    for e in elements:
        if not 1 <= e.step <= length:
            raise StructuralError(f"{e} does not fit a sequence of length {length}")
        buckets[e.step - 1].add(e)
    return tuple(frozenset(b) for b in buckets)


def with_step(seq: SelectionSequence, t: int, extra: Iterable[ElementRef]) -> SelectionSequence:
    """Return ``seq`` padded to length ``t`` with ``extra`` merged into step ``t``."""
    seq = pad(seq, t)
    return seq[: t - 1] + (seq[t - 1] | frozenset(extra),) + seq[t:]


class ObjectiveHandle:
    """Evaluation oracle for a normalized, non-decreasing set function.

    ``raw`` receives a selection sequence and returns a real number; the
    handle reports ``raw(seq) - raw(empty sequence of the same length)`` so
    that ``f(empty) == 0`` holds exactly.  ``eval_count`` counts logical
    oracle queries, including those answered from the optional cache.

    ``empty_cost(l)`` gives the cost ``c(empty)`` of a length-``l`` prefix so
    that harness code can report ``c(X) = c(empty) - f(X)``.
    """

    def __init__(
        self,
        raw: Callable[[SelectionSequence], float],
        grounds: GroundSets,
        *,
        submodular: bool = False,
        name: str = "objective",
        empty_cost: Callable[[int], float] | None = None,
        cache: bool = False,
        length_sensitive: bool = False,
    ):
        self._raw = raw
        self.grounds = grounds
        self.monotone = True
        self.submodular = submodular
        self.name = name
        self.length_sensitive = length_sensitive
        self._empty_cost = empty_cost
        self._empty_raw: dict[int, float] = {}
        self._cache: dict | None = {} if cache else None
        self._singletons: dict[ElementRef, float] = {}
        self._lock = threading.Lock()
        self._count = 0

    @property
    def eval_count(self) -> int:
        return self._count

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0

    def empty_cost(self, length: int) -> float:
        if self._empty_cost is None:
            return 0.0
        return self._empty_cost(length)

    def _check(self, seq: SelectionSequence) -> None:
        T = self.grounds.horizon
        if len(seq) > T:
            raise StructuralError(f"sequence length {len(seq)} exceeds horizon {T}")
        for t, X in enumerate(seq, start=1):
            for e in X:
                if e.step != t or e not in self.grounds:
                    raise StructuralError(f"{e} is not an element of V_{t}")

    def _key(self, seq: SelectionSequence):
        if self.length_sensitive:
            return (len(seq), flatten(seq))
        return flatten(seq)

    def evaluate(self, seq: SelectionSequence) -> float:
        self._check(seq)
        with self._lock:
            self._count += 1
        if not any(seq):
            return 0.0
        if self._cache is not None:
            key = self._key(seq)
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        value = self._compute(seq)
        if self._cache is not None:
            self._cache[key] = value
        return value

    def _compute(self, seq: SelectionSequence) -> float:
        n = len(seq)
        base = self._empty_raw.get(n)
        if base is None:
            base = float(self._raw((frozenset(),) * n))
            self._empty_raw[n] = base
        value = float(self._raw(seq)) - base
        if math.isnan(value):
            raise ObjectiveContractError(f"{self.name} returned NaN")
        if value < 0:
            # Round-off on monotone objectives can dip a hair below zero.
            if value > -1e-9 * max(1.0, abs(base)):
                return 0.0
            raise ObjectiveContractError(f"{self.name} returned negative value {value}")
        return value

    __call__ = evaluate

    def singleton(self, e: ElementRef) -> tuple[float, bool]:
        """Return ``(f({e}), was_computed)``; values are cached per element."""
        hit = self._singletons.get(e)
        if hit is not None:
            return hit, False
        value = self.evaluate(with_step((), e.step, (e,)))
        self._singletons[e] = value
        return value, True

    def value_of_set(self, elements: Iterable[ElementRef], length: int | None = None) -> float:
        """Evaluate a flat element set, padded to ``length`` (default: horizon)."""
        if length is None:
            length = self.grounds.horizon
        return self.evaluate(sequence_from_set(elements, length))


def evaluate(obj: ObjectiveHandle, seq: SelectionSequence) -> float:
    """Return ``f(seq)``; costs exactly one oracle call."""
    return obj.evaluate(seq)


def marginal(obj: ObjectiveHandle, base: SelectionSequence, extra: Iterable[ElementRef]) -> float:
    """Return ``f(base with extra merged into its last step) - f(base)``.

    Costs exactly two oracle calls.
    """
    extra = frozenset(extra)
    if not base:
        raise StructuralError("marginal needs a base sequence of length >= 1")
    last = len(base)
    if extra & base[-1]:
        raise StructuralError("extra overlaps the base at its last step")
    return obj.evaluate(with_step(base, last, extra)) - obj.evaluate(base)

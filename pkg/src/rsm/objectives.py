"""Concrete objectives: modular and coverage oracles, plus two
linear-Gaussian estimation objectives (batch log-det and Kalman trace)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import (
    ElementRef,
    GroundSets,
    NumericalError,
    ObjectiveHandle,
    RSMError,
)


class SpecError(RSMError, ValueError):
    """An objective specification is malformed."""


@dataclass(frozen=True)
class ModularSpec:
    weights: Mapping[ElementRef, float]


@dataclass(frozen=True)
class CoverageSpec:
    item_weights: Mapping[str, float]
    covers: Mapping[ElementRef, frozenset]


def make_modular(spec: ModularSpec, grounds: GroundSets, *, cache: bool = False) -> ObjectiveHandle:
    weights = dict(spec.weights)
    for e, w in weights.items():
        if w < 0:
            raise SpecError(f"negative weight {w} for {e}")
    total = math.fsum(weights.get(e, 0.0) for e in grounds.all_elements())

    def raw(seq):
        return math.fsum(weights.get(e, 0.0) for X in seq for e in X)

    return ObjectiveHandle(
        raw, grounds, submodular=True, name="modular", empty_cost=lambda _: total, cache=cache
    )


def make_coverage(spec: CoverageSpec, grounds: GroundSets, *, cache: bool = False) -> ObjectiveHandle:
    items = sorted(spec.item_weights)
    bit = {u: 1 << i for i, u in enumerate(items)}
    item_w = [float(spec.item_weights[u]) for u in items]
    if any(w < 0 for w in item_w):
        raise SpecError("negative universe item weight")
    masks: dict[ElementRef, int] = {}
    for e, covered in spec.covers.items():
        m = 0
        for u in covered:
            if u not in bit:
                raise SpecError(f"{e} covers unknown universe item {u!r}")
            m |= bit[u]
        masks[e] = m
    total = math.fsum(item_w)

    def raw(seq):
        m = 0
        for X in seq:
            for e in X:
                m |= masks.get(e, 0)
        return math.fsum(w for i, w in enumerate(item_w) if m >> i & 1)

    return ObjectiveHandle(
        raw, grounds, submodular=True, name="coverage", empty_cost=lambda _: total, cache=cache
    )


def _cholesky(M: np.ndarray, what: str) -> np.ndarray:
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky failed on {what}") from exc
    if np.min(np.diag(L)) < 1e-10:
        raise NumericalError(f"{what} is numerically singular")
    return L


def logdet_pd(M: np.ndarray, what: str = "matrix") -> float:
    L = _cholesky(M, what)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def inv_pd(M: np.ndarray, what: str = "matrix") -> np.ndarray:
    L = _cholesky(M, what)
    Linv = np.linalg.solve(L, np.eye(len(M)))
    out = Linv.T @ Linv
    return 0.5 * (out + out.T)


@dataclass
class Sensor:
    C: np.ndarray
    R: np.ndarray

    def information(self) -> np.ndarray:
        """``C^T R^{-1} C``."""
        Rinv = inv_pd(np.atleast_2d(self.R), "sensor noise R")
        C = np.atleast_2d(self.C)
        out = C.T @ Rinv @ C
        return 0.5 * (out + out.T)


@dataclass
class LinearGaussianModel:
    F: np.ndarray
    Q: np.ndarray
    prior_cov: np.ndarray
    sensor_banks: Sequence[Sequence[Sensor]]
    _info: list = field(init=False, repr=False)

    def __post_init__(self):
        n = self.state_dim
        for name, M in (("F", self.F), ("Q", self.Q), ("prior_cov", self.prior_cov)):
            if M.shape != (n, n):
                raise SpecError(f"{name} must be {n}x{n}, got {M.shape}")
        eig = np.linalg.eigvalsh(0.5 * (self.Q + self.Q.T))
        if eig.min() < -1e-10:
            raise SpecError("process noise Q is not PSD")
        _cholesky(self.prior_cov, "prior covariance")
        self._info = [[s.information() for s in bank] for bank in self.sensor_banks]

    @property
    def state_dim(self) -> int:
        return self.F.shape[0]

    @property
    def horizon(self) -> int:
        return len(self.sensor_banks)

    def check_grounds(self, grounds: GroundSets) -> None:
        if grounds.horizon != self.horizon:
            raise SpecError("sensor banks and ground sets have different horizons")
        for t in range(1, self.horizon + 1):
            if len(grounds.step(t)) != len(self.sensor_banks[t - 1]):
                raise SpecError(f"|sensor bank at {t}| != |V_{t}|")

    def info(self, e: ElementRef) -> np.ndarray:
        return self._info[e.step - 1][e.local_index]

    def first_prior(self) -> np.ndarray:
        """Covariance of ``x_1``: ``F Sigma0 F^T + Q``."""
        P = self.F @ self.prior_cov @ self.F.T + self.Q
        return 0.5 * (P + P.T)

    def batch_prior_information(self, length: int) -> np.ndarray:
        """Information matrix of ``(x_1, ..., x_length)`` with no measurements."""
        n = self.state_dim
        J = np.zeros((n * length, n * length))
        J[:n, :n] = inv_pd(self.first_prior(), "prior of x_1")
        if length > 1:
            Qinv = inv_pd(self.Q, "process noise Q")
            FtQi = self.F.T @ Qinv
            for k in range(length - 1):
                a, b = slice(n * k, n * (k + 1)), slice(n * (k + 1), n * (k + 2))
                J[a, a] += FtQi @ self.F
                J[a, b] -= FtQi
                J[b, a] -= FtQi.T
                J[b, b] += Qinv
        return J

    def filtered_covariances(self, seq) -> list[np.ndarray]:
        """Information-filter covariances ``Sigma_{s|s}`` for ``s = 1..len(seq)``."""
        out = []
        P = self.prior_cov
        for s, X in enumerate(seq, start=1):
            pred = self.F @ P @ self.F.T + self.Q
            J = inv_pd(0.5 * (pred + pred.T), f"predicted covariance at step {s}")
            for e in X:
                J = J + self.info(e)
            P = inv_pd(J, f"filter information at step {s}")
            out.append(P)
        return out


@dataclass
class EstimatorOutput:
    filtered: list
    batch_logdet: float


def estimator_output(model: LinearGaussianModel, seq) -> EstimatorOutput:
    """Filtered covariances and ``logdet Sigma_{1:t}`` for a selection."""
    J = _batch_information(model, seq)
    return EstimatorOutput(model.filtered_covariances(seq), -logdet_pd(J, "batch information"))


def _batch_information(model: LinearGaussianModel, seq) -> np.ndarray:
    n = model.state_dim
    J = model.batch_prior_information(len(seq))
    for t, X in enumerate(seq, start=1):
        blk = slice(n * (t - 1), n * t)
        for e in X:
            J[blk, blk] += model.info(e)
    return J


def make_batch_logdet(model: LinearGaussianModel, grounds: GroundSets, *, cache: bool = False) -> ObjectiveHandle:
    """``f(A_{1:t}) = logdet J(A_{1:t}) - logdet J(empty)``, J the batch information matrix."""
    model.check_grounds(grounds)
    n = model.state_dim
    priors: dict[int, np.ndarray] = {}

    def prior(length):
        if length not in priors:
            priors[length] = model.batch_prior_information(length)
        return priors[length]

    def raw(seq):
        length = len(seq)
        J = prior(length).copy()
        for t, X in enumerate(seq, start=1):
            if not X:
                continue
            blk = slice(n * (t - 1), n * t)
            for e in X:
                J[blk, blk] += model.info(e)
        step = max((t for t, X in enumerate(seq, start=1) if X), default=length)
        return logdet_pd(J, f"batch information matrix (through step {step})")

    def empty_cost(length):
        return -logdet_pd(prior(length), "batch prior information")

    return ObjectiveHandle(
        raw,
        grounds,
        submodular=True,
        name="batch_logdet",
        empty_cost=empty_cost,
        cache=cache,
        length_sensitive=True,
    )


def make_kalman_trace(model: LinearGaussianModel, grounds: GroundSets, *, cache: bool = False) -> ObjectiveHandle:
    """``f(A_{1:tau}) = sum_{s<=tau} [tr Sigma_{s|s}(empty) - tr Sigma_{s|s}(A)]``.

    Prefixes of length ``tau`` only sum the first ``tau`` filter steps.
    """
    model.check_grounds(grounds)
    empty = (frozenset(),) * model.horizon
    empty_traces = np.cumsum([np.trace(P) for P in model.filtered_covariances(empty)])

    def raw(seq):
        return -float(sum(np.trace(P) for P in model.filtered_covariances(seq)))

    def empty_cost(length):
        return float(empty_traces[length - 1]) if length else 0.0

    return ObjectiveHandle(
        raw,
        grounds,
        submodular=False,
        name="kalman_trace",
        empty_cost=empty_cost,
        cache=cache,
        length_sensitive=True,
    )


def covers_from_lists(grounds: GroundSets, lists: Sequence[Sequence[Sequence[str]]]) -> dict:
    """Map ``lists[t][i]`` (items covered by element i of step t+1) onto element refs."""
    out = {}
    for t, step_lists in enumerate(lists, start=1):
        for e, items in zip(grounds.step(t), step_lists):
            out[e] = frozenset(items)
    return out


def weights_from_lists(grounds: GroundSets, lists: Sequence[Sequence[float]]) -> dict:
    out = {}
    for t, ws in enumerate(lists, start=1):
        for e, w in zip(grounds.step(t), ws):
            out[e] = float(w)
    return out


"""Scenario generators: UAV navigation, WSN target tracking, and small
synthetic coverage/modular instances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Budgets, GroundSets, ObjectiveHandle
from ..objectives import (
    CoverageSpec,
    LinearGaussianModel,
    ModularSpec,
    Sensor,
    make_batch_logdet,
    make_coverage,
    make_kalman_trace,
    make_modular,
)

UAV_DEFAULTS = {
    "dt": 1.0,
    "ground_sensors": 10,
    "gps_variance": 2.0,
    "altimeter_std": 0.5,
    "ground_noise_low": 0.5,
    "ground_noise_high": 2.0,
    "objective": "logdet",
}

WSN_DEFAULTS = {
    "dt": 1.0,
    "sensors": 100,
    "side": 100.0,
    "sigma0": 0.5,
    "gamma": 0.01,
    "objective": "trace",
}

SYNTHETIC_DEFAULTS = {
    "objective": "coverage",
    "elements_per_step": 5,
    "universe_size": 8,
    "cover_prob": 0.35,
    "weight_low": 0.5,
    "weight_high": 2.0,
}


def double_integrator(dt: float) -> np.ndarray:
    I3 = np.eye(3)
    return np.block([[I3, dt * I3], [np.zeros((3, 3)), I3]])


def _position_rows() -> np.ndarray:
    return np.hstack([np.eye(3), np.zeros((3, 3))])


def generate_uav_scenario(seed, params: dict | None = None, horizon: int = 5):
    """Double-integrator UAV with a GPS, an altimeter and random ground sensors.

    The same sensor bank is available at every step.
    """
    p = {**UAV_DEFAULTS, **(params or {})}
    if p["ground_sensors"] < 0 or not 0 < p["ground_noise_low"] <= p["ground_noise_high"]:
        raise ValueError("need ground_sensors >= 0 and 0 < ground_noise_low <= ground_noise_high")
    rng = np.random.default_rng(seed)
    gps = Sensor(_position_rows(), p["gps_variance"] * np.eye(3))
    alt = Sensor(np.eye(6)[2:3], np.array([[p["altimeter_std"] ** 2]]))
    bank = [gps, alt]
    for _ in range(int(p["ground_sensors"])):
        C = rng.standard_normal((1, 6))
        R = np.array([[rng.uniform(p["ground_noise_low"], p["ground_noise_high"])]])
        bank.append(Sensor(C, R))
    model = LinearGaussianModel(double_integrator(p["dt"]), np.eye(6), np.eye(6), [bank] * horizon)
    grounds = GroundSets.from_sizes([len(bank)] * horizon)
    return model, grounds


def wsn_trajectory(rng: np.random.Generator, side: float, horizon: int) -> np.ndarray:
    """Straight line between random points on the faces ``x = 0`` and ``x = side``
    at a constant random altitude; one row per step."""
    z = rng.uniform(0, side)
    start = np.array([0.0, rng.uniform(0, side), z])
    end = np.array([side, rng.uniform(0, side), z])
    if horizon == 1:
        return start[None, :]
    frac = np.arange(horizon)[:, None] / (horizon - 1)
    return start + frac * (end - start)


def range_noise(d2, sigma0: float, gamma: float):
    """Per-axis noise variance ``sigma0^2 + gamma d^2`` at squared distance ``d2``."""
    return sigma0**2 + gamma * d2


def generate_wsn_scenario(seed, params: dict | None = None, horizon: int = 5):
    """Ground sensors in a cube measuring target position, with noise
    ``(sigma0^2 + gamma d^2) I_3`` growing with distance ``d`` to the target."""
    p = {**WSN_DEFAULTS, **(params or {})}
    if p["sensors"] < 1 or p["side"] <= 0 or p["sigma0"] <= 0 or p["gamma"] < 0:
        raise ValueError("need sensors >= 1, side > 0, sigma0 > 0, gamma >= 0")
    rng = np.random.default_rng(seed)
    positions = rng.uniform(0, p["side"], size=(int(p["sensors"]), 3))
    path = wsn_trajectory(rng, p["side"], horizon)
    C = _position_rows()
    banks = []
    for target in path:
        d2 = np.sum((positions - target) ** 2, axis=1)
        var = range_noise(d2, p["sigma0"], p["gamma"])
        banks.append([Sensor(C, v * np.eye(3)) for v in var])
    model = LinearGaussianModel(double_integrator(p["dt"]), np.eye(6), np.eye(6), banks)
    grounds = GroundSets.from_sizes([len(positions)] * horizon)
    return model, grounds


def generate_synthetic_scenario(seed, params: dict | None = None, horizon: int = 2):
    p = {**SYNTHETIC_DEFAULTS, **(params or {})}
    rng = np.random.default_rng(seed)
    grounds = GroundSets.from_sizes([int(p["elements_per_step"])] * horizon)

    def weight():
        return float(rng.uniform(p["weight_low"], p["weight_high"]))

    if p["objective"] == "modular":
        spec = ModularSpec({e: weight() for e in grounds.all_elements()})
        return make_modular(spec, grounds, cache=True), grounds
    if p["objective"] != "coverage":
        raise ValueError(f"synthetic objective must be 'coverage' or 'modular', got {p['objective']!r}")
    items = [f"u{i}" for i in range(int(p["universe_size"]))]
    covers = {}
    for e in grounds.all_elements():
        chosen = [u for u in items if rng.random() < p["cover_prob"]]
        covers[e] = frozenset(chosen or [items[int(rng.integers(len(items)))]])
    spec = CoverageSpec({u: weight() for u in items}, covers)
    return make_coverage(spec, grounds, cache=True), grounds


_ESTIMATION_OBJECTIVES = {"logdet": make_batch_logdet, "trace": make_kalman_trace}


@dataclass
class Scenario:
    obj: ObjectiveHandle
    grounds: GroundSets
    budgets: Budgets
    model: LinearGaussianModel | None = None


def build_scenario(kind: str, seed, params: dict, horizon: int, alpha: int, beta: int) -> Scenario:
    """Generate one scenario instance and wrap it in a cached objective."""
    model = None
    if kind == "synthetic":
        obj, grounds = generate_synthetic_scenario(seed, params, horizon)
    else:
        if kind == "uav_navigation":
            model, grounds = generate_uav_scenario(seed, params, horizon)
            name = params.get("objective", UAV_DEFAULTS["objective"])
        elif kind == "wsn_tracking":
            model, grounds = generate_wsn_scenario(seed, params, horizon)
            name = params.get("objective", WSN_DEFAULTS["objective"])
        else:
            raise ValueError(f"unknown scenario kind {kind!r}")
        if name not in _ESTIMATION_OBJECTIVES:
            raise ValueError(f"objective must be one of {sorted(_ESTIMATION_OBJECTIVES)}, got {name!r}")
        obj = _ESTIMATION_OBJECTIVES[name](model, grounds, cache=True)
    budgets = Budgets.uniform(alpha, beta, horizon)
    budgets.validate(grounds)
    return Scenario(obj, grounds, budgets, model)

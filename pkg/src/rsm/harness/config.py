"""TOML run configuration.

A config has one ``[run]`` table with the protocol settings and at most one
table per scenario kind holding that kind's parameters.  Unknown tables and
unknown keys are rejected so that a typo can never silently fall back to a
default.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..attacks import ATTACKERS
from ..solver import SELECTORS
from .scenarios import SYNTHETIC_DEFAULTS, UAV_DEFAULTS, WSN_DEFAULTS

KIND_PARAMS = {
    "uav_navigation": UAV_DEFAULTS,
    "wsn_tracking": WSN_DEFAULTS,
    "synthetic": SYNTHETIC_DEFAULTS,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    horizon: int
    alpha: int
    beta: int
    trials: int = 1
    seed: int = 0
    selectors: tuple[str, ...] = SELECTORS
    attackers: tuple[str, ...] = ("worst",)
    bounds: bool = False
    out: str | None = None
    enumeration_cap: int = 10**6
    node_budget: int = 5_000_000
    curvature_samples: int = 1000
    epsilon: float = 1e-6
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KIND_PARAMS:
            raise ConfigError(f"kind must be one of {sorted(KIND_PARAMS)}, got {self.kind!r}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if not 0 <= self.beta <= self.alpha:
            raise ConfigError(f"need 0 <= beta <= alpha, got alpha={self.alpha}, beta={self.beta}")
        for s in self.selectors:
            if s not in SELECTORS:
                raise ConfigError(f"unknown selector {s!r}; expected one of {SELECTORS}")
        for a in self.attackers:
            if a not in ATTACKERS:
                raise ConfigError(f"unknown attacker {a!r}; expected one of {sorted(ATTACKERS)}")
        unknown = set(self.params) - set(KIND_PARAMS[self.kind])
        if unknown:
            raise ConfigError(f"unknown [{self.kind}] keys: {sorted(unknown)}")

    def with_overrides(self, **kw) -> "ScenarioConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_RUN_KEYS = {
    "kind", "horizon", "alpha", "beta", "trials", "seed", "selectors", "attackers",
    "bounds", "out", "enumeration_cap", "node_budget", "curvature_samples", "epsilon",
}
_REQUIRED = {"kind", "horizon", "alpha", "beta"}


def parse_config(doc: dict) -> ScenarioConfig:
    unknown_tables = set(doc) - {"run"} - set(KIND_PARAMS)
    if unknown_tables:
        raise ConfigError(f"unknown tables: {sorted(unknown_tables)}")
    run = doc.get("run")
    if not isinstance(run, dict):
        raise ConfigError("missing [run] table")
    unknown = set(run) - _RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown [run] keys: {sorted(unknown)}")
    missing = _REQUIRED - set(run)
    if missing:
        raise ConfigError(f"missing [run] keys: {sorted(missing)}")
    for kind, defaults in KIND_PARAMS.items():
        bad = set(doc.get(kind, {})) - set(defaults)
        if bad:
            raise ConfigError(f"unknown [{kind}] keys: {sorted(bad)}")
    kw = dict(run)
    for key in ("selectors", "attackers"):
        if key in kw:
            kw[key] = tuple(kw[key])
    return ScenarioConfig(params=dict(doc.get(run["kind"], {})), **kw)


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path, "rb") as fh:
        return parse_config(tomllib.load(fh))


def loads_config(text: str) -> ScenarioConfig:
    return parse_config(tomllib.loads(text))

import math
from pathlib import Path

import numpy as np
import pytest

from rsm.harness.config import ConfigError, ScenarioConfig, loads_config
from rsm.harness.montecarlo import MonteCarloResult, run_monte_carlo, run_trial
from rsm.harness.results import HEADER, ResultRow, emit_results, format_csv, parse_csv, read_results
from rsm.harness.scenarios import (
    build_scenario,
    generate_uav_scenario,
    generate_wsn_scenario,
    range_noise,
    wsn_trajectory,
)

GOLDEN = Path(__file__).parent / "golden" / "synthetic_random_random.csv"

SYNTH = """
[run]
kind = "synthetic"
horizon = 2
alpha = 3
beta = 1
trials = 1
seed = 13
selectors = ["random"]
attackers = ["random"]

[synthetic]
objective = "coverage"
elements_per_step = 5
"""


def synth(**kw):
    return loads_config(SYNTH).with_overrides(**kw)


# --- config ---

def test_config_parses_and_applies_overrides():
    # [TRIVIAL]
    cfg = synth(trials=4, selectors=("ram", "greedy"))
    assert cfg.kind == "synthetic" and cfg.trials == 4 and cfg.selectors == ("ram", "greedy")
    assert cfg.params == {"objective": "coverage", "elements_per_step": 5}


@pytest.mark.parametrize(
    "text",
    [
        SYNTH.replace("trials = 1", "trials = 1\ntrails = 2"),
        SYNTH.replace("elements_per_step", "elements_per_stp"),
        SYNTH + "\n[extra]\nx = 1\n",
        SYNTH.replace("trials = 1", "trials = 0"),
        SYNTH.replace("beta = 1", "beta = 4"),
        SYNTH.replace('["random"]\n\n', '["oracle"]\n\n'),
        SYNTH.replace('kind = "synthetic"', 'kind = "mars"'),
        SYNTH.replace("horizon = 2\n", ""),
        "[synthetic]\nobjective = 'coverage'\n",
    ],
)
def test_config_rejects_bad_documents(text):
    # [TRIVIAL] unknown keys and invalid values fail fast
    with pytest.raises(ConfigError):
        loads_config(text)


def test_example_configs_load():
    # [TRIVIAL]
    from rsm.harness.config import load_config

    for path in sorted((Path(__file__).parents[1] / "configs").glob("*.toml")):
        load_config(path)


# --- scenarios ---

def test_uav_scenario_shape_and_reproducibility():
    # [TRIVIAL] 12 sensors x 5 steps -> 60 ids; fixed seed reproduces
    model, g = generate_uav_scenario(3, horizon=5)
    assert len(g.all_elements()) == 60 and len({e.global_id for e in g.all_elements()}) == 60
    assert model.state_dim == 6
    F = model.F
    assert np.array_equal(F[:3, 3:], np.eye(3)) and np.array_equal(model.Q, np.eye(6))
    gps, alt = model.sensor_banks[0][:2]
    assert np.array_equal(gps.R, 2 * np.eye(3)) and alt.R[0, 0] == 0.25
    model2, _ = generate_uav_scenario(3, horizon=5)
    for s1, s2 in zip(model.sensor_banks[0], model2.sensor_banks[0]):
        assert np.array_equal(s1.C, s2.C) and np.array_equal(s1.R, s2.R)
    for s in model.sensor_banks[0][2:]:
        assert 0.5 <= s.R[0, 0] <= 2.0


def test_wsn_noise_and_trajectory():
    # [TRIVIAL] d = 0 gives sigma0^2 I; trajectory crosses opposite faces at one altitude
    assert range_noise(0.0, 0.5, 0.01) == 0.25
    path = wsn_trajectory(np.random.default_rng(0), 100.0, 5)
    assert path[0, 0] == 0.0 and path[-1, 0] == 100.0
    assert np.all(path[:, 2] == path[0, 2])
    model, g = generate_wsn_scenario(1, {"sensors": 20}, horizon=3)
    assert len(g.step(1)) == 20 and g.horizon == 3
    model0, _ = generate_wsn_scenario(1, {"sensors": 20, "gamma": 0.0}, horizon=3)
    assert all(np.array_equal(s.R, 0.25 * np.eye(3)) for bank in model0.sensor_banks for s in bank)


def test_wsn_identical_sensors_ram_equals_greedy():
    # [TRIVIAL] gamma = 0 and beta = 0
    cfg = ScenarioConfig("wsn_tracking", 3, 4, 0, trials=2, seed=5, selectors=("ram", "greedy"),
                         attackers=("worst",), params={"sensors": 15, "gamma": 0.0})
    res = run_monte_carlo(cfg, workers=1)
    ram = [r.f_value for r in res.rows if r.selector == "ram"]
    greedy = [r.f_value for r in res.rows if r.selector == "greedy"]
    assert ram == greedy


def test_build_scenario_rejects_unknown():
    # [TRIVIAL]
    with pytest.raises(ValueError):
        build_scenario("mars", 0, {}, 2, 1, 0)
    with pytest.raises(ValueError):
        build_scenario("uav_navigation", 0, {"objective": "entropy"}, 2, 1, 0)


# --- results ---

def row(**kw):
    base = dict(trial=0, selector="ram", attacker="worst", step=1, error=1.5, f_value=0.1,
                bound_apriori=None, bound_aposteriori=0.3, bound_prefailure=None, oracle_calls=7)
    base.update(kw)
    return ResultRow(**base)


def test_header_is_fixed(tmp_path):
    # [TRIVIAL]
    assert ",".join(HEADER) == (
        "trial,selector,attacker,step,error,f_value,bound_apriori,bound_aposteriori,bound_prefailure,oracle_calls"
    )
    path = tmp_path / "empty.csv"
    emit_results([], path)
    assert path.read_text() == ",".join(HEADER) + "\n"


def test_round_trip(tmp_path):
    # [TRIVIAL] parse(emit(table)) == table, floats included bit for bit
    rows = [row(), row(step=2, error=-0.1 + 0.2, f_value=1 / 3, bound_apriori=1e-300, oracle_calls=0)]
    path = tmp_path / "r.csv"
    emit_results(rows, path)
    assert read_results(path) == rows
    assert parse_csv(format_csv(rows)) == rows


def test_plot_data_files(tmp_path):
    # [TRIVIAL]
    rows = [row(trial=0, error=1.0), row(trial=1, error=3.0), row(selector="greedy", error=5.0)]
    written = emit_results(rows, tmp_path / "out.csv", plot_data=True)
    names = sorted(p.name for p in written)
    assert names == ["out.csv", "out_greedy_worst.dat", "out_ram_worst.dat"]
    assert (tmp_path / "out_ram_worst.dat").read_text().splitlines()[1] == "1 2.0 2"


def test_emit_errors_surface(tmp_path):
    # [TRIVIAL]
    with pytest.raises(FileNotFoundError):
        emit_results([row()], tmp_path / "missing" / "r.csv")
    with pytest.raises(ValueError):
        emit_results([row()], tmp_path / "r.json", format="json")


def test_parse_rejects_wrong_header():
    # [TRIVIAL]
    with pytest.raises(ValueError):
        parse_csv("a,b\n1,2\n")


# --- Monte Carlo ---

def test_golden_csv():
    # [DERIVED] pinned after the first run
    res = run_monte_carlo(synth(), workers=1)
    assert format_csv(res.rows) == GOLDEN.read_text()


def test_all_selectors_present_and_summary_is_arithmetic_mean():
    # [TRIVIAL]
    cfg = synth(trials=5, selectors=("ram", "greedy", "random"), attackers=("worst", "random"))
    res = run_monte_carlo(cfg, workers=1)
    assert {r.selector for r in res.rows} == {"ram", "greedy", "random"}
    for (sel, att, step), s in res.summary().items():
        errs = [r.error for r in res.rows if (r.selector, r.attacker, r.step) == (sel, att, step)]
        assert s.n == len(errs) == 5
        assert abs(s.mean_error - sum(errs) / len(errs)) <= 1e-12
        assert s.stderr == pytest.approx(np.std(errs, ddof=1) / math.sqrt(5), abs=1e-12)


def test_error_is_empty_cost_minus_f():
    # [TRIVIAL]
    cfg = synth(trials=2, selectors=("ram",), attackers=("worst",))
    res = run_monte_carlo(cfg, workers=1)
    total = build_scenario_total(cfg)
    for r in res.rows:
        if r.trial == 0:
            assert r.error == total - r.f_value


def build_scenario_total(cfg):
    from rsm.harness.montecarlo import make_scenario

    return make_scenario(cfg, 0).obj.empty_cost(1)


def test_beta_zero_rows_identical():
    # [TRIVIAL]
    cfg = synth(trials=3, beta=0, selectors=("ram", "greedy"), attackers=("worst",))
    res = run_monte_carlo(cfg, workers=1)
    ram = [(r.trial, r.step, r.f_value) for r in res.rows if r.selector == "ram"]
    greedy = [(r.trial, r.step, r.f_value) for r in res.rows if r.selector == "greedy"]
    assert ram == greedy


def test_adding_trials_keeps_earlier_ones():
    # [TRIVIAL] per-trial seeds do not depend on the trial count
    small = run_monte_carlo(synth(trials=2, selectors=("random",)), workers=1)
    big = run_monte_carlo(synth(trials=4, selectors=("random",)), workers=1)
    assert big.rows[: len(small.rows)] == small.rows


def test_selector_list_does_not_change_other_pairs():
    # [TRIVIAL]
    one = run_monte_carlo(synth(trials=2, selectors=("random",)), workers=1)
    two = run_monte_carlo(synth(trials=2, selectors=("ram", "random")), workers=1)
    assert [r for r in two.rows if r.selector == "random"] == one.rows


def test_parallel_matches_serial():
    # [TRIVIAL] rows are merged in trial order
    cfg = synth(trials=4, selectors=("ram", "random"), attackers=("worst", "random"))
    assert run_monte_carlo(cfg, workers=2).rows == run_monte_carlo(cfg, workers=1).rows


def test_bounds_only_on_ram_worst_rows():
    # [TRIVIAL]
    cfg = synth(trials=2, selectors=("ram", "greedy"), attackers=("worst", "random"), bounds=True)
    res = run_monte_carlo(cfg, workers=1)
    for r in res.rows:
        has = r.bound_apriori is not None
        assert has == (r.selector == "ram" and r.attacker == "worst")
        if has:
            assert 0.0 <= r.bound_apriori <= 1.0


def test_capacity_errors_are_recorded_not_fatal():
    # [TRIVIAL]
    cfg = synth(trials=2, selectors=("ram", "random"), attackers=("worst",), enumeration_cap=2)
    res = run_monte_carlo(cfg, workers=1)
    assert len(res.failures) == 4
    assert all("CapacityError" in f[3] for f in res.failures)
    assert res.rows == []


def test_worker_env(monkeypatch):
    # [TRIVIAL]
    from rsm.harness.montecarlo import worker_count

    monkeypatch.setenv("RSM_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("RSM_WORKERS", "0")
    with pytest.raises(ValueError):
        worker_count()

"""Command-line entry point: ``rsm run | curvature | bounds | optimal | verify``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..attacks import ATTACKERS, worst_case_removal
from ..core import CapacityError, DegenerateInstanceError, RSMError
from ..solver import SELECTORS, optimal_value, run_episode
from ..analysis.curvature import kappa, total_curvature
from ..analysis.grid import grid_instances, run_grid
from .config import ConfigError, load_config
from .montecarlo import curvature_for, episode_bounds, episode_seed, make_scenario, run_monte_carlo
from .results import emit_results, format_csv


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def cmd_run(args) -> int:
    config = load_config(args.config).with_overrides(
        trials=args.trials,
        seed=args.seed,
        selectors=args.selectors,
        attackers=args.attackers,
        bounds=True if args.bounds else None,
        out=args.out,
    )
    result = run_monte_carlo(config)
    if config.out:
        emit_results(result.rows, config.out, plot_data=args.plot_data)
    else:
        sys.stdout.write(format_csv(result.rows))
    for trial, sel, att, msg in result.failures:
        print(f"trial {trial} {sel}/{att} skipped: {msg}", file=sys.stderr)
    print("selector attacker step mean_error stderr n", file=sys.stderr)
    for (sel, att, step), s in result.summary().items():
        print(f"{sel} {att} {step} {s.mean_error:.6g} {s.stderr:.3g} {s.n}", file=sys.stderr)
    return 0


def cmd_curvature(args) -> int:
    config = load_config(args.config)
    scenario = make_scenario(config, 0)
    obj = scenario.obj
    rng = np.random.default_rng(config.seed)
    if obj.submodular:
        k = kappa(obj)
        print(f"kappa {k.value!r} (exact)")
    if args.mode == "exact":
        c = total_curvature(obj, mode="exact")
    else:
        c = total_curvature(obj, mode="sampled", sample_budget=args.samples, rng=rng)
    label = "exact" if c.certified else f"estimate, {c.sample_count} samples, lower bound on the true value"
    print(f"total_curvature {c.value!r} ({label})")
    return 0


def cmd_bounds(args) -> int:
    config = load_config(args.config)
    if args.selector != "ram" or ATTACKERS[args.attacker] is not worst_case_removal:
        print("bounds are defined for --selector ram --attacker worst only", file=sys.stderr)
        return 2
    scenario = make_scenario(config, 0)
    rng = np.random.default_rng(episode_seed(config.seed, 0, args.selector, args.attacker))
    trace = run_episode(scenario.obj, scenario.grounds, scenario.budgets, "ram", args.attacker, rng=rng)
    curv = curvature_for(scenario, config, rng)
    bounds = episode_bounds(scenario, trace, curv, config.epsilon)
    tag = "" if curv.certified else " (estimate: sampled curvature)"
    print(f"curvature {curv.kind} {curv.value!r}{tag}")
    print(f"apriori {bounds.apriori!r}{tag}")
    print("step f_value aposteriori prefailure")
    for t, step in enumerate(trace.steps, start=1):
        post, pre = bounds.aposteriori[t - 1], bounds.prefailure[t - 1]
        print(f"{t} {step.value!r} {'undefined' if post is None else repr(post)} "
              f"{'undefined' if pre is None else repr(pre)}")
    return 0


def cmd_optimal(args) -> int:
    config = load_config(args.config)
    scenario = make_scenario(config, 0)
    budget = args.node_budget or config.node_budget
    res = optimal_value(scenario.obj, scenario.grounds, scenario.budgets, budget)
    first = sorted(e.global_id for e in res.optimal_first_move)
    print(f"f_star {res.value!r}")
    print(f"first_move {first}")
    print(f"nodes {res.node_count}")
    return 0


def cmd_verify(args) -> int:
    report = run_grid(grid_instances(seeds=args.seeds), lemma_trials=args.lemma_trials)
    for line in report.summary_lines():
        print(line)
    for check, label, detail in report.violations[:20]:
        print(f"VIOLATION {check} {label}: {detail}")
    return 1 if report.violations else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rsm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo run; writes the result CSV")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--selectors", type=_csv_list, help=f"comma list from {','.join(SELECTORS)}")
    run.add_argument("--attackers", type=_csv_list, help="comma list from worst,greedy,random")
    run.add_argument("--bounds", action="store_true", help="add bound columns to ram/worst rows")
    run.add_argument("--plot-data", action="store_true", help="also write per-pair step/mean-error files")
    run.set_defaults(func=cmd_run)

    curv = sub.add_parser("curvature", help="curvature of the first trial's objective")
    curv.add_argument("--config", required=True)
    curv.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    curv.add_argument("--samples", type=int, default=1000)
    curv.set_defaults(func=cmd_curvature)

    bnd = sub.add_parser("bounds", help="per-step bound report for one RAM episode")
    bnd.add_argument("--config", required=True)
    bnd.add_argument("--selector", default="ram")
    bnd.add_argument("--attacker", default="worst")
    bnd.set_defaults(func=cmd_bounds)

    opt = sub.add_parser("optimal", help="exact max-min value (tiny instances only)")
    opt.add_argument("--config", required=True)
    opt.add_argument("--node-budget", type=int)
    opt.set_defaults(func=cmd_optimal)

    ver = sub.add_parser("verify", help="exhaustive desk-scale soundness grid")
    ver.add_argument("--seeds", type=int, default=24)
    ver.add_argument("--lemma-trials", type=int, default=0)
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CapacityError, DegenerateInstanceError, RSMError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

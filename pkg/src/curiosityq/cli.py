"""Command-line entry point.

Subcommands:

  run       four-way clique-corridor comparison; writes traj_<algo>_seed<N>.csv
            (t, s, a, s2, realized_gain, cumulative_gain), summary.csv,
            aggregate.csv (t plus one mean cumulative-gain column per algorithm),
            config.json and timings.json
  fig1      cumulative gain vs summed one-step gains for i.i.d. categorical data;
            CSV columns t, cumulative_gain, sum_one_step_gains
  compare   exact posterior-propagating Q vs frozen-posterior DP for scaled
            copies of a random table; CSV columns c, error, tail, c2_error
  env-dump  write an environment in the "S A init" text format

Every CSV starts with a '#'-prefixed JSON metadata line. Exit status is 0 on
success, 2 on invalid input and 3 when a resource or convergence limit is hit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .baselines import QLearnParams
from .environment import make_clique_corridor, make_random_mdp
from .errors import ConvergenceError, DomainError, ResourceError
from .harness import (
    ALGORITHMS,
    ExperimentConfig,
    compare_exact_vs_dp,
    fig1_demo,
    parse_number,
    parse_seeds,
    run_experiment,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def _floats(text: str) -> list[float]:
    return [parse_number(v) for v in text.split(",") if v.strip()]


def _emit(text: str, out: str | None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curiosityq",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="clique-corridor comparison of the four explorers")
    run.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    run.add_argument("--clique-size", type=int)
    run.add_argument("--corridor", type=int, dest="corridor_len")
    run.add_argument("--env-seed", type=int, help="environment seed (default: the run seed)")
    run.add_argument("--env-file", help="load a fixed environment instead of generating one")
    run.add_argument("--prior", dest="prior_count", help="prior pseudo-count per entry, e.g. 1/60")
    run.add_argument("--steps", type=int, dest="T")
    run.add_argument("--gamma", type=float)
    run.add_argument("--seeds", help="'1..10' or '1,2,3'")
    run.add_argument("--algos", dest="algorithms", help=f"comma list from {','.join(ALGORITHMS)}")
    run.add_argument("--out", dest="out_dir")
    run.add_argument("--tol", type=float)
    run.add_argument("--solver", choices=("value", "policy"))
    run.add_argument("--jobs", type=int, help="worker processes for independent runs")
    run.add_argument("--qlearn-rate", type=float)
    run.add_argument("--qlearn-epsilon", type=float)
    run.add_argument("--qlearn-gamma", type=float)
    run.add_argument("--qlearn-init", type=float)

    fig = sub.add_parser("fig1", help="cumulative gain vs summed one-step gains")
    fig.add_argument("--samples", type=int, default=1000)
    fig.add_argument("--p", default="0.1,0.5,0.4", help="probability vector, comma separated")
    fig.add_argument("--prior-count", default="50/3", help="symmetric Dirichlet pseudo-count")
    fig.add_argument("--seed", type=int, default=0)
    fig.add_argument("--out", help="CSV path (default: stdout)")

    cmp_ = sub.add_parser("compare", help="exact depth-limited Q vs frozen-posterior DP")
    cmp_.add_argument("--states", type=int, default=2)
    cmp_.add_argument("--actions", type=int, default=2)
    cmp_.add_argument("--gamma", type=float, default=0.5)
    cmp_.add_argument("--tau", type=int, default=10)
    cmp_.add_argument("--scales", default="1,2,4,8")
    cmp_.add_argument("--seed", type=int, default=0)
    cmp_.add_argument("--out", help="CSV path (default: stdout)")

    env = sub.add_parser("env-dump", help="write a generated environment in text format")
    env.add_argument("kind", choices=("clique-corridor", "random"))
    env.add_argument("--clique-size", type=int, default=5)
    env.add_argument("--corridor", type=int, default=50)
    env.add_argument("--states", type=int, default=5)
    env.add_argument("--actions", type=int, default=2)
    env.add_argument("--seed", type=int, default=0)
    env.add_argument("--out", help="file path (default: stdout)")
    return parser


def config_from_args(args) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        data.update(json.loads(Path(args.config).read_text()))
    for key in (
        "clique_size", "corridor_len", "env_seed", "env_file", "prior_count", "T",
        "gamma", "seeds", "algorithms", "out_dir", "tol", "solver", "jobs",
    ):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    config = ExperimentConfig.from_dict(data)
    overrides = {
        "learning_rate": args.qlearn_rate,
        "epsilon": args.qlearn_epsilon,
        "gamma": args.qlearn_gamma,
        "init_q": args.qlearn_init,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        config.qlearn = replace(config.qlearn, **overrides)
    return config


def _cmd_run(args) -> int:
    config = config_from_args(args)
    result = run_experiment(config)
    for name in config.algorithms:
        finals = [result.summaries[(name, s)]["final_cumulative_gain"] for s in config.seeds]
        print(f"{name:7s} mean final cumulative gain {sum(finals) / len(finals):.4f}")
    print(f"wrote {len(result.files)} CSV files to {config.out_dir}")
    return EXIT_OK


def _cmd_fig1(args) -> int:
    p = _floats(args.p)
    prior = [parse_number(args.prior_count)] * len(p)
    _emit(fig1_demo(args.samples, p, prior, args.seed).to_csv(), args.out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    result = compare_exact_vs_dp(args.states, args.actions, args.gamma, args.tau, _floats(args.scales), args.seed)
    _emit(result.to_csv(), args.out)
    return EXIT_OK


def _cmd_env_dump(args) -> int:
    if args.kind == "clique-corridor":
        env = make_clique_corridor(args.clique_size, args.corridor, args.seed)
    else:
        env = make_random_mdp(args.states, args.actions, args.seed)
    _emit(env.to_text(), args.out)
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "fig1": _cmd_fig1, "compare": _cmd_compare, "env-dump": _cmd_env_dump}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ResourceError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

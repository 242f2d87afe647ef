"""Experiment orchestration: the four-way clique-corridor comparison, the
cumulative-vs-summed gain demonstration and the exact-vs-DP error study.

Every CSV starts with one '#'-prefixed JSON metadata line. Wall-clock times
go to a separate ``timings.json`` so that reruns produce byte-identical CSVs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import QLearnParams, explore_greedy, explore_qlearning, explore_random
from .dirichlet_mdp import PosteriorTable, new_posterior_table
from .environment import CliqueCorridorLayout, EnvSpec, RngStream, make_clique_corridor
from .errors import DomainError
from .info_geometry import as_counts, kl_dirichlet
from .planner import DEFAULT_GAMMA, DEFAULT_TOL, exact_q_depth_all, explore_dp, solve_dp, tail_bound
from .trajectory import TrajectoryLog

log = logging.getLogger(__name__)

ALGORITHMS = ("random", "greedy", "qlearn", "dp")
STATE_INDEXING = "0-based; clique A = 0..k-1, corridor = k..k+L-1, clique B = k+L..2k+L-1"


def parse_number(text) -> float:
    """Float from '0.5', '1/60' or a number."""
    if isinstance(text, (int, float)):
        return float(text)
    return float(Fraction(str(text).strip()))


def parse_seeds(text) -> list[int]:
    """Seeds from '1..10', '1,2,5' or a list."""
    if isinstance(text, (list, tuple)):
        return [int(s) for s in text]
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


@dataclass
class ExperimentConfig:
    clique_size: int = 5
    corridor_len: int = 50
    env_seed: int | None = None
    env_file: str | None = None
    prior_count: float = 1.0 / 60.0
    gamma: float = DEFAULT_GAMMA
    T: int = 4000
    seeds: list[int] = field(default_factory=lambda: list(range(1, 11)))
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    qlearn: QLearnParams = field(default_factory=QLearnParams)
    out_dir: str = "results"
    tol: float = DEFAULT_TOL
    solver: str = "policy"
    jobs: int = 1

    def __post_init__(self):
        if isinstance(self.qlearn, dict):
            self.qlearn = QLearnParams(**self.qlearn)
        self.seeds = parse_seeds(self.seeds)
        self.prior_count = parse_number(self.prior_count)
        if isinstance(self.algorithms, str):
            self.algorithms = [a.strip() for a in self.algorithms.split(",") if a.strip()]
        self.validate()

    def validate(self):
        if not self.algorithms:
            raise DomainError("at least one algorithm is required")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise DomainError(f"unknown algorithms: {sorted(unknown)}")
        if self.T < 1:
            raise DomainError("T must be >= 1")
        if not self.seeds:
            raise DomainError("at least one seed is required")
        if not self.prior_count > 0:
            raise DomainError("prior_count must be positive")
        if not 0.0 <= self.gamma < 1.0:
            raise DomainError("gamma must lie in [0, 1)")
        if self.tol <= 0:
            raise DomainError("tol must be positive")
        if self.clique_size < 1 or self.corridor_len < 1:
            raise DomainError("clique_size and corridor_len must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        extra = set(data) - set(known)
        if extra:
            raise DomainError(f"unknown config keys: {sorted(extra)}")
        return cls(**known)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["qlearn"] = asdict(self.qlearn)
        return d

    def digest(self) -> str:
        """Hash of everything that affects results (output location and worker count excluded)."""
        d = self.to_dict()
        d.pop("out_dir")
        d.pop("jobs")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def metadata_line(meta: dict) -> str:
    return "# " + json.dumps(meta, sort_keys=True) + "\n"


def read_metadata(path) -> dict:
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("# "):
        raise DomainError(f"{path} has no metadata line")
    return json.loads(first[2:])


def _csv_text(meta: dict, header, rows) -> str:
    buf = io.StringIO()
    buf.write(metadata_line(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# clique-corridor comparison
# ---------------------------------------------------------------------------


def build_environment(config: ExperimentConfig, seed: int) -> tuple[EnvSpec, CliqueCorridorLayout | None]:
    if config.env_file:
        env = EnvSpec.load(config.env_file)
        lay = CliqueCorridorLayout(config.clique_size, config.corridor_len)
        return env, (lay if lay.S == env.S and env.A == 2 else None)
    env_seed = seed if config.env_seed is None else config.env_seed
    return (
        make_clique_corridor(config.clique_size, config.corridor_len, env_seed),
        CliqueCorridorLayout(config.clique_size, config.corridor_len),
    )


def run_algorithm(name: str, env: EnvSpec, table: PosteriorTable, config: ExperimentConfig, seed: int) -> TrajectoryLog:
    if name == "random":
        return explore_random(env, table, config.T, seed)
    if name == "greedy":
        return explore_greedy(env, table, config.T, seed)
    if name == "qlearn":
        return explore_qlearning(env, table, config.qlearn, config.T, seed)
    if name == "dp":
        return explore_dp(env, table, config.gamma, config.T, seed, config.tol, config.solver)
    raise DomainError(f"unknown algorithm {name!r}")


def count_crossings(states, layout: CliqueCorridorLayout) -> int:
    """Number of arrivals in a clique other than the last clique visited."""
    last = None
    n = 0
    for s in states:
        region = layout.region(int(s))
        if region == "corridor":
            continue
        if last is not None and region != last:
            n += 1
        last = region
    return n


def summarize(trajectory: TrajectoryLog, layout: CliqueCorridorLayout | None, initial_state: int) -> dict:
    """Final gain, occupancy fractions and crossings for one run.

    Occupancy counts the state the agent is in when it acts at t = 1..T.
    """
    out = {"final_cumulative_gain": float(trajectory.cumulative_gain[-1]) if len(trajectory) else 0.0}
    if layout is None or len(trajectory) == 0:
        return out
    states = np.asarray(trajectory.s)
    regions = np.array([layout.region(int(s)) for s in states])
    home = layout.region(initial_state)
    entrance = layout.corridor[0] if home == "A" else layout.corridor[-1]
    out.update(
        frac_clique_a=float(np.mean(regions == "A")),
        frac_corridor=float(np.mean(regions == "corridor")),
        frac_clique_b=float(np.mean(regions == "B")),
        frac_home=float(np.mean((regions == home) | (states == entrance))),
        crossings=count_crossings(np.append(states, trajectory.s2[-1]), layout),
    )
    return out


def _run_one(args):
    name, seed, config = args
    env, layout = build_environment(config, seed)
    table = new_posterior_table(env.S, env.A, config.prior_count)
    start = time.perf_counter()
    trajectory = run_algorithm(name, env, table, config, seed)
    wall = time.perf_counter() - start
    summary = summarize(trajectory, layout, env.initial_state)
    trajectory.final_table = None
    return name, seed, trajectory, summary, wall


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trajectories: dict
    summaries: dict
    aggregate: dict
    files: list


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run every (algorithm, seed) pair; optionally write trajectory, summary and aggregate CSVs."""
    config.validate()
    jobs = [(name, seed, config) for name in config.algorithms for seed in config.seeds]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    digest = config.digest()
    base_meta = {
        "config_hash": digest,
        "version": __version__,
        "gamma": config.gamma,
        "prior_count": config.prior_count,
        "T": config.T,
        "state_indexing": STATE_INDEXING,
        "qlearn": asdict(config.qlearn),
        "solver": config.solver,
        "tol": config.tol,
    }
    trajectories, summaries, timings = {}, {}, {}
    for name, seed, trajectory, summary, wall in results:
        trajectory.metadata.update(base_meta, algorithm=name, seed=seed)
        trajectories[(name, seed)] = trajectory
        summaries[(name, seed)] = summary
        timings[f"{name}/seed{seed}"] = wall

    aggregate = {
        name: np.mean([trajectories[(name, s)].cumulative_gain for s in config.seeds], axis=0)
        for name in config.algorithms
    }

    files = []
    if write:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for (name, seed), trajectory in trajectories.items():
            path = out / f"traj_{name}_seed{seed}.csv"
            path.write_text(trajectory.to_csv())
            files.append(path)

        keys = ["final_cumulative_gain", "frac_clique_a", "frac_corridor", "frac_clique_b", "frac_home", "crossings"]
        rows = [
            [name, seed] + [summaries[(name, seed)].get(k, "") for k in keys]
            for name in config.algorithms
            for seed in config.seeds
        ]
        path = out / "summary.csv"
        path.write_text(_csv_text({**base_meta, "seeds": config.seeds}, ["algorithm", "seed"] + keys, rows))
        files.append(path)

        t_axis = np.arange(1, config.T + 1)
        rows = [[int(t)] + [aggregate[n][i] for n in config.algorithms] for i, t in enumerate(t_axis)]
        path = out / "aggregate.csv"
        path.write_text(
            _csv_text({**base_meta, "seeds": config.seeds, "statistic": "mean over seeds"}, ["t"] + list(config.algorithms), rows)
        )
        files.append(path)
        (out / "config.json").write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
        (out / "timings.json").write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
        log.info("wrote %d files to %s", len(files), out)
    return ExperimentResult(config, trajectories, summaries, aggregate, files)


# ---------------------------------------------------------------------------
# cumulative gain vs summed one-step gains
# ---------------------------------------------------------------------------

FIG1_COLUMNS = ("t", "cumulative_gain", "sum_one_step_gains")


@dataclass
class Fig1Result:
    t: np.ndarray
    cumulative_gain: np.ndarray
    sum_one_step_gains: np.ndarray
    metadata: dict

    def to_csv(self) -> str:
        rows = zip(self.t, self.cumulative_gain, self.sum_one_step_gains)
        return _csv_text(self.metadata, FIG1_COLUMNS, ([int(t), float(c), float(g)] for t, c, g in rows))


def fig1_demo(samples: int, p, prior, seed: int) -> Fig1Result:
    """Learn a categorical from i.i.d. samples, tracking two notions of gain.

    Row t holds KL(posterior_t || prior) and the running sum of the realized
    one-step gains KL(posterior_t || posterior_{t-1}). Row 0 is all zeros.
    """
    if samples < 0:
        raise DomainError("samples must be nonnegative")
    probs = np.asarray(p, dtype=float)
    if probs.ndim != 1 or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise DomainError("p must be a probability vector")
    prior = as_counts(prior)
    if prior.size != probs.size:
        raise DomainError("p and prior must have the same length")
    rng = RngStream(seed)
    cdf = np.cumsum(probs)
    counts = prior.copy()
    cum = np.zeros(samples + 1)
    summed = np.zeros(samples + 1)
    running = 0.0
    for t in range(1, samples + 1):
        x = min(int(np.searchsorted(cdf, rng.uniform(), side="right")), probs.size - 1)
        nxt = counts.copy()
        nxt[x] += 1.0
        running += kl_dirichlet(nxt, counts)
        counts = nxt
        summed[t] = running
        cum[t] = kl_dirichlet(counts, prior)
    meta = {
        "version": __version__,
        "seed": seed,
        "samples": samples,
        "p": [float(v) for v in probs],
        "prior": [float(v) for v in prior],
    }
    return Fig1Result(np.arange(samples + 1), cum, summed, meta)


# ---------------------------------------------------------------------------
# exact (posterior-propagating) vs frozen-posterior DP
# ---------------------------------------------------------------------------

COMPARE_COLUMNS = ("c", "error", "tail", "c2_error")


def base_table(S: int, A: int, seed: int) -> PosteriorTable:
    """Random pseudo-counts in [0.5, 1.5), the unit-scale table of the error study."""
    gen = np.random.Generator(np.random.PCG64(seed))
    return PosteriorTable(gen.uniform(0.5, 1.5, size=(S, A, S)))


@dataclass
class CompareResult:
    rows: list
    metadata: dict

    @property
    def errors(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])

    @property
    def c2_errors(self) -> np.ndarray:
        return np.array([r[3] for r in self.rows])

    def to_csv(self) -> str:
        return _csv_text(self.metadata, COMPARE_COLUMNS, self.rows)


def compare_exact_vs_dp(
    S: int,
    A: int,
    gamma: float,
    tau: int,
    prior_scales,
    seed: int,
    tol: float = DEFAULT_TOL,
    table: PosteriorTable | None = None,
) -> CompareResult:
    """Max over (s, a) of |depth-tau exact Q - DP Q| for each scaling c of a base table."""
    base = table if table is not None else base_table(S, A, seed)
    rows = []
    for c in prior_scales:
        scaled = base.scaled(float(c))
        exact = exact_q_depth_all(scaled, gamma, tau)
        approx = solve_dp(scaled, gamma, tol).values
        err = float(np.max(np.abs(exact - approx)))
        tail = tail_bound(scaled.stats(), gamma, tau)
        rows.append([float(c), err, tail, float(c) ** 2 * err])
    meta = {
        "version": __version__,
        "S": base.S,
        "A": base.A,
        "gamma": gamma,
        "tau": tau,
        "seed": seed,
        "tol": tol,
        "scales": [float(c) for c in prior_scales],
    }
    return CompareResult(rows, meta)

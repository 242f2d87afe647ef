"""Shared simulation loop and trajectory records for all explorers."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .dirichlet_mdp import PosteriorTable, observe, realized_gain
from .environment import EnvSpec, RngStream, step
from .errors import DomainError
from .info_geometry import kl_dirichlet

TRAJECTORY_COLUMNS = ("t", "s", "a", "s2", "realized_gain", "cumulative_gain")


@dataclass
class TrajectoryLog:
    t: np.ndarray
    s: np.ndarray
    a: np.ndarray
    s2: np.ndarray
    realized_gain: np.ndarray
    cumulative_gain: np.ndarray
    metadata: dict = field(default_factory=dict)
    final_table: PosteriorTable | None = None

    def __len__(self) -> int:
        return len(self.t)

    def to_csv(self) -> str:
        """CSV text with a '#'-prefixed JSON metadata line."""
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.metadata, sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for row in zip(self.t, self.s, self.a, self.s2, self.realized_gain, self.cumulative_gain):
            writer.writerow([int(row[0]), int(row[1]), int(row[2]), int(row[3]), repr(float(row[4])), repr(float(row[5]))])
        return buf.getvalue()


class Explorer(Protocol):
    def act(self, s: int, table: PosteriorTable) -> int: ...

    def learn(self, s: int, a: int, s2: int, reward: float, before: PosteriorTable, after: PosteriorTable) -> None: ...


def spawn_streams(seed: int) -> tuple[RngStream, np.random.Generator]:
    """Independent environment and agent streams derived from one seed."""
    env_seq, agent_seq = np.random.SeedSequence(seed).spawn(2)
    env_rng = RngStream.from_generator(np.random.Generator(np.random.PCG64(env_seq)))
    return env_rng, np.random.Generator(np.random.PCG64(agent_seq))


def check_shapes(env: EnvSpec, table: PosteriorTable):
    if table.shape != (env.S, env.A, env.S):
        raise DomainError(f"table shape {table.shape} does not match environment ({env.S}, {env.A}, {env.S})")


def simulate(env: EnvSpec, table: PosteriorTable, T: int, explorer: Explorer, env_rng: RngStream) -> TrajectoryLog:
    """Run ``explorer`` for T steps from env.initial_state, updating the posterior after each step.

    Every algorithm goes through this loop, so the posterior update path is
    identical. The realized gain of a step is measured against the posterior
    before that step's observation.
    """
    check_shapes(env, table)
    if T < 0:
        raise DomainError("T must be nonnegative")
    prior = table
    row_kl = np.zeros((env.S, env.A))
    cum = 0.0
    ts = np.arange(1, T + 1)
    ss = np.empty(T, dtype=int)
    aa = np.empty(T, dtype=int)
    s2s = np.empty(T, dtype=int)
    gains = np.empty(T)
    cums = np.empty(T)
    s = env.initial_state
    for i in range(T):
        a = int(explorer.act(s, table))
        s2 = step(env, s, a, env_rng)
        gain = realized_gain(table, s, a, s2)
        after = observe(table, s, a, s2)
        new_kl = kl_dirichlet(after.counts[s, a], prior.counts[s, a])
        cum += new_kl - row_kl[s, a]
        row_kl[s, a] = new_kl
        explorer.learn(s, a, s2, gain, table, after)
        ss[i], aa[i], s2s[i], gains[i], cums[i] = s, a, s2, gain, cum
        table = after
        s = s2
    return TrajectoryLog(ts, ss, aa, s2s, gains, cums, final_table=table)

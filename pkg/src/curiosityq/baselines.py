"""Comparison explorers: uniform random, one-step greedy, and Q-learning on realized gain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirichlet_mdp import PosteriorTable
from .environment import EnvSpec
from .errors import DomainError
from .info_geometry import expected_info_gain
from .planner import gain_matrix
from .trajectory import TrajectoryLog, check_shapes, simulate, spawn_streams


# Sweeps over the clique-corridor task show the home-clique trapping for
# discounts in [0.3, 0.8]; at 0.95 the learner instead loops inside the corridor.
DEFAULT_QLEARN_GAMMA = 0.5


@dataclass(frozen=True)
class QLearnParams:
    learning_rate: float = 0.5
    epsilon: float = 0.05
    gamma: float = DEFAULT_QLEARN_GAMMA
    init_q: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.learning_rate <= 1.0:
            raise DomainError("learning_rate must lie in [0, 1]")
        if not 0.0 <= self.epsilon <= 1.0:
            raise DomainError("epsilon must lie in [0, 1]")
        if not 0.0 <= self.gamma < 1.0:
            raise DomainError("gamma must lie in [0, 1)")


class RandomExplorer:
    def __init__(self, n_actions: int, rng: np.random.Generator):
        self.n_actions = n_actions
        self.rng = rng

    def act(self, s, table):
        return int(self.rng.integers(self.n_actions))

    def learn(self, s, a, s2, reward, before, after):
        pass


class GreedyExplorer:
    """Pick the action with the largest expected one-step gain; lowest index on ties."""

    def __init__(self, table: PosteriorTable):
        self.G = gain_matrix(table)

    def act(self, s, table):
        return int(np.argmax(self.G[s]))

    def learn(self, s, a, s2, reward, before, after):
        self.G[s, a] = expected_info_gain(after.counts[s, a])


class QLearningExplorer:
    """Epsilon-greedy tabular Q-learning; greedy ties go to the lowest action index."""

    def __init__(self, S: int, A: int, params: QLearnParams, rng: np.random.Generator):
        self.params = params
        self.rng = rng
        self.Q = np.full((S, A), float(params.init_q))

    def act(self, s, table):
        if self.rng.random() < self.params.epsilon:
            return int(self.rng.integers(self.Q.shape[1]))
        return int(np.argmax(self.Q[s]))

    def learn(self, s, a, s2, reward, before, after):
        p = self.params
        target = reward + p.gamma * self.Q[s2].max()
        self.Q[s, a] += p.learning_rate * (target - self.Q[s, a])


def explore_random(env: EnvSpec, table: PosteriorTable, T: int, seed: int) -> TrajectoryLog:
    check_shapes(env, table)
    env_rng, agent_rng = spawn_streams(seed)
    log = simulate(env, table, T, RandomExplorer(env.A, agent_rng), env_rng)
    log.metadata.update(algorithm="random", seed=seed)
    return log


def explore_greedy(env: EnvSpec, table: PosteriorTable, T: int, seed: int) -> TrajectoryLog:
    check_shapes(env, table)
    env_rng, _ = spawn_streams(seed)
    log = simulate(env, table, T, GreedyExplorer(table), env_rng)
    log.metadata.update(algorithm="greedy", seed=seed)
    return log


def explore_qlearning(
    env: EnvSpec, table: PosteriorTable, params: QLearnParams, T: int, seed: int
) -> TrajectoryLog:
    check_shapes(env, table)
    env_rng, agent_rng = spawn_streams(seed)
    log = simulate(env, table, T, QLearningExplorer(env.S, env.A, params, agent_rng), env_rng)
    log.metadata.update(
        algorithm="qlearn",
        seed=seed,
        learning_rate=params.learning_rate,
        epsilon=params.epsilon,
        gamma=params.gamma,
        init_q=params.init_q,
    )
    return log

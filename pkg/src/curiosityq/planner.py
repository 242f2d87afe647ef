"""Dynamic-programming approximation of optimal Bayesian exploration.

``solve_dp`` freezes the current posterior and solves the stationary Bellman
equation with expected information gain as reward. ``exact_q_depth`` instead
lets the posterior move along every hypothetical branch, truncated at a
finite depth. Their gap is the approximation error studied in ``harness``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .dirichlet_mdp import PosteriorTable, TableStats
from .environment import EnvSpec
from .errors import ConvergenceError, DomainError, ResourceError
from .info_geometry import expected_info_gain
from .trajectory import TrajectoryLog, check_shapes, simulate, spawn_streams

DEFAULT_TOL = 1e-10
DEFAULT_GAMMA = 0.95
DEFAULT_MAX_ITER = 1_000_000
DEFAULT_NODE_BUDGET = 10**7


@dataclass(frozen=True)
class QTable:
    values: np.ndarray
    gamma: float
    iterations: int = 0


@dataclass(frozen=True)
class Policy:
    action_of: np.ndarray

    def __call__(self, s: int) -> int:
        return int(self.action_of[s])


def _check_gamma(gamma: float):
    if not 0.0 <= gamma < 1.0:
        raise DomainError("gamma must lie in [0, 1)")


def gain_matrix(table: PosteriorTable) -> np.ndarray:
    """G[s, a] = expected information gain of the (s, a) row."""
    return np.array([[expected_info_gain(table.counts[s, a]) for a in range(table.A)] for s in range(table.S)])


def transition_matrix(table: PosteriorTable) -> np.ndarray:
    """P[s, a, s'] = posterior predictive probability of s' after (s, a)."""
    return table.counts / table.totals()[:, :, None]


def _value_iteration(G, P, gamma, tol, q0, max_iter):
    q = G.copy() if q0 is None else np.array(q0, dtype=float)
    for it in range(1, max_iter + 1):
        q_new = G + gamma * (P @ q.max(axis=1))
        residual = float(np.max(np.abs(q_new - q)))
        q = q_new
        if residual <= tol:
            return q, it
    raise ConvergenceError(f"value iteration did not reach tol={tol} in {max_iter} sweeps")


def _policy_iteration(G, P, gamma, tol, q0, max_iter):
    S, A = G.shape
    idx = np.arange(S)
    policy = np.zeros(S, dtype=int) if q0 is None else np.argmax(q0, axis=1)
    eye = np.eye(S)
    for it in range(1, max_iter + 1):
        v = np.linalg.solve(eye - gamma * P[idx, policy], G[idx, policy])
        q = G + gamma * (P @ v)
        best = q.max(axis=1)
        current = q[idx, policy]
        # switch only on a clear improvement so exact ties cannot cycle
        improve = best > current + 1e-13 * np.maximum(1.0, np.abs(best))
        if not improve.any():
            break
        policy = np.where(improve, np.argmax(q, axis=1), policy)
    else:
        raise ConvergenceError(f"policy iteration did not stabilise in {max_iter} rounds")
    # polish so the returned table meets the residual contract
    polished, sweeps = _value_iteration(G, P, gamma, tol, q, DEFAULT_MAX_ITER)
    return polished, it + sweeps


def solve_bellman(G, P, gamma, tol=DEFAULT_TOL, q0=None, method="value", max_iter=DEFAULT_MAX_ITER):
    """Fixed point of q = G + gamma P max_a q with sup-norm residual <= tol."""
    _check_gamma(gamma)
    if tol <= 0:
        raise DomainError("tol must be positive")
    if method == "value":
        return _value_iteration(G, P, gamma, tol, q0, max_iter)
    if method == "policy":
        return _policy_iteration(G, P, gamma, tol, q0, max_iter)
    raise DomainError(f"unknown solver method {method!r}")


def solve_dp(
    table: PosteriorTable,
    gamma: float,
    tol: float = DEFAULT_TOL,
    method: str = "value",
    q0: np.ndarray | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> QTable:
    """Curiosity Q-values of the frozen-posterior Bellman equation."""
    q, iterations = solve_bellman(gain_matrix(table), transition_matrix(table), gamma, tol, q0, method, max_iter)
    return QTable(q, gamma, iterations)


def policy_from_q(q: QTable) -> Policy:
    """Greedy policy; ties go to the lowest action index."""
    return Policy(np.argmax(q.values, axis=1))


def tail_bound(stats: TableStats, gamma: float, tau: int) -> float:
    """Uniform bound g_alpha gamma^tau / (1 - gamma) on the depth-tau truncation error."""
    _check_gamma(gamma)
    if tau < 0:
        raise DomainError("tau must be nonnegative")
    return stats.g_alpha * gamma**tau / (1.0 - gamma)


def node_estimate(S: int, A: int, tau: int) -> int:
    """Upper bound on distinct (posterior, state, action) nodes in a depth-tau search.

    After k hypothetical steps the posterior differs from the root by a
    multiset of k transitions, so each level is capped both by the plain tree
    size (S A)^(k+1) and by the number of such multisets times S A.
    """
    cells = S * A * S
    return sum(min((S * A) ** (k + 1), comb(k + cells - 1, cells - 1) * S * A) for k in range(tau))


class _DepthEvaluator:
    """Memoised posterior-propagating recursion.

    Hypothetical posteriors are tracked as integer increments over the root
    counts, which makes them exact dictionary keys.
    """

    def __init__(self, table: PosteriorTable, gamma: float, budget: int):
        self.base = table.counts
        self.S, self.A = table.S, table.A
        self.gamma = gamma
        self.budget = budget
        self.inc = np.zeros(table.shape, dtype=np.int64)
        self.q_memo: dict = {}
        self.g_memo: dict = {}

    def _row(self, s, a):
        return self.base[s, a] + self.inc[s, a]

    def q(self, s: int, a: int, tau: int) -> float:
        key = (self.inc.tobytes(), s, a, tau)
        hit = self.q_memo.get(key)
        if hit is not None:
            return hit
        if len(self.q_memo) >= self.budget:
            raise ResourceError(f"depth search exceeded node budget {self.budget}")
        row = self._row(s, a)
        gkey = (s, a, self.inc[s, a].tobytes())
        g = self.g_memo.get(gkey)
        if g is None:
            g = self.g_memo[gkey] = expected_info_gain(row)
        value = g
        if tau > 1 and self.gamma > 0.0:
            probs = row / row.sum()
            future = 0.0
            for s2 in range(self.S):
                self.inc[s, a, s2] += 1
                future += probs[s2] * max(self.q(s2, b, tau - 1) for b in range(self.A))
                self.inc[s, a, s2] -= 1
            value = g + self.gamma * future
        self.q_memo[key] = value
        return value


def exact_q_depth(
    table: PosteriorTable,
    s: int,
    a: int,
    gamma: float,
    tau: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """Depth-tau optimal discounted curiosity Q-value with the posterior updated along each branch."""
    return exact_q_depth_all(table, gamma, tau, node_budget)[s, a]


def exact_q_depth_all(
    table: PosteriorTable, gamma: float, tau: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> np.ndarray:
    """``exact_q_depth`` for every (s, a), sharing one memo table."""
    _check_gamma(gamma)
    if tau < 1:
        raise DomainError("tau must be >= 1")
    est = node_estimate(table.S, table.A, tau)
    if est > node_budget:
        raise ResourceError(f"depth-{tau} search needs up to {est} nodes; budget is {node_budget}")
    ev = _DepthEvaluator(table, gamma, node_budget)
    return np.array([[ev.q(s, a, tau) for a in range(table.A)] for s in range(table.S)])


class DPExplorer:
    """Act greedily on the frozen-posterior curiosity Q-values, re-solved every step.

    G and P are cached and only the visited row is refreshed after each
    observation; each solve is warm-started from the previous Q-table.
    Actions whose values differ by less than the solver tolerance count as
    tied, so the choice does not depend on which solver produced the table.
    """

    def __init__(self, table: PosteriorTable, gamma: float, tol: float = DEFAULT_TOL, method: str = "policy"):
        _check_gamma(gamma)
        self.gamma = gamma
        self.tol = tol
        self.method = method
        self.G = gain_matrix(table)
        self.P = transition_matrix(table)
        self.q = None

    def act(self, s: int, table: PosteriorTable) -> int:
        self.q, _ = solve_bellman(self.G, self.P, self.gamma, self.tol, self.q, self.method)
        row = self.q[s]
        # values closer than the solver tolerance are ties; take the lowest index
        return int(np.flatnonzero(row >= row.max() - self.tol)[0])

    def learn(self, s, a, s2, reward, before, after):
        row = after.counts[s, a]
        self.G[s, a] = expected_info_gain(row)
        self.P[s, a] = row / row.sum()


def explore_dp(
    env: EnvSpec,
    table: PosteriorTable,
    gamma: float,
    T: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    method: str = "policy",
) -> TrajectoryLog:
    check_shapes(env, table)
    env_rng, _ = spawn_streams(seed)
    log = simulate(env, table, T, DPExplorer(table, gamma, tol, method), env_rng)
    log.metadata.update(algorithm="dp", seed=seed, gamma=gamma, tol=tol, solver=method)
    return log

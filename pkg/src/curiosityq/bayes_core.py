"""Curiosity planning over a finite class of candidate environments.

A ``HypothesisModel`` holds a finite list of predictors together with the
current posterior weights p(theta | h). A predictor is any callable mapping
``(history, action)`` to a probability vector over observations, where a
history is a tuple of ``(action, observation)`` pairs.

The planners below expand the full action/observation tree and therefore cost
O((n_o n_a)^tau); a node budget turns runaway horizons into a ``ResourceError``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, ImpossibleObservationError, ResourceError, SupportMismatchError

History = tuple[tuple[int, int], ...]
Predictor = Callable[[History, int], np.ndarray]

DEFAULT_NODE_BUDGET = 10**7
_UNDERFLOW = 1e-300
_ROW_TOL = 1e-12


@dataclass(frozen=True)
class MarkovHypothesis:
    """Predictor whose distribution depends only on the last observation and the action.

    ``kernel[o_prev, a]`` is the distribution of the next observation; the
    empty history behaves as if ``initial`` had just been observed.
    """

    kernel: np.ndarray
    initial: int = 0

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=float)
        if k.ndim != 3 or k.shape[0] != k.shape[2]:
            raise DomainError("Markov kernel must have shape (n_obs, n_actions, n_obs)")
        if np.any(k < 0) or not np.allclose(k.sum(axis=2), 1.0, atol=_ROW_TOL, rtol=0):
            raise DomainError("Markov kernel rows must be probability vectors")
        if not 0 <= self.initial < k.shape[0]:
            raise DomainError("initial observation out of range")
        object.__setattr__(self, "kernel", k)

    def __call__(self, history: History, action: int) -> np.ndarray:
        last = history[-1][1] if history else self.initial
        return self.kernel[last, action]


@dataclass(frozen=True)
class HypothesisModel:
    hypotheses: tuple
    weights: np.ndarray
    n_actions: int
    n_observations: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != len(self.hypotheses) or w.size == 0:
            raise DomainError("need one weight per hypothesis")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("weights must be a probability vector")
        if self.n_actions < 1 or self.n_observations < 1:
            raise DomainError("action and observation counts must be positive")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, hypotheses: Sequence[Predictor], n_actions: int, n_observations: int):
        k = len(hypotheses)
        return cls(tuple(hypotheses), np.full(k, 1.0 / k), n_actions, n_observations)

    def with_weights(self, weights: np.ndarray) -> "HypothesisModel":
        return HypothesisModel(self.hypotheses, weights, self.n_actions, self.n_observations)

    def likelihoods(self, history: History, action: int) -> np.ndarray:
        """Matrix of p(o | h a; theta), one row per hypothesis."""
        self._check_action(action)
        rows = np.array([np.asarray(p(history, action), dtype=float) for p in self.hypotheses])
        if rows.shape != (len(self.hypotheses), self.n_observations):
            raise DomainError("predictor returned a vector of the wrong length")
        if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1.0) > _ROW_TOL):
            raise DomainError("predictor rows must sum to 1")
        return rows

    def predictive(self, history: History, action: int) -> np.ndarray:
        """Marginal p(o | h a) under the current weights."""
        return self.weights @ self.likelihoods(history, action)

    def _check_action(self, action: int):
        if not 0 <= action < self.n_actions:
            raise DomainError(f"action {action} out of range")


def _check_history(model: HypothesisModel, h: History):
    for a, o in h:
        if not (0 <= a < model.n_actions and 0 <= o < model.n_observations):
            raise DomainError(f"history step {(a, o)} out of range")


def _normalize(w: np.ndarray) -> np.ndarray:
    w = np.where(w < _UNDERFLOW, 0.0, w)
    return w / w.sum()


def posterior_update(model: HypothesisModel, a: int, o: int, history: History = ()) -> HypothesisModel:
    """Bayes update of the weights after doing ``a`` and seeing ``o`` following ``history``."""
    if not 0 <= o < model.n_observations:
        raise DomainError(f"observation {o} out of range")
    lik = model.likelihoods(history, a)[:, o]
    joint = model.weights * lik
    evidence = joint.sum()
    if evidence <= 0.0:
        raise ImpossibleObservationError(f"observation {o} has zero probability after action {a}")
    return model.with_weights(_normalize(joint / evidence))


def info_gain(current: HypothesisModel, reference: HypothesisModel) -> float:
    """KL(current weights || reference weights) in nats."""
    p = np.asarray(current.weights)
    q = np.asarray(reference.weights)
    if p.shape != q.shape:
        raise DomainError("models have different hypothesis sets")
    mask = p > 0
    if np.any(q[mask] <= 0):
        raise SupportMismatchError("current puts mass where reference has none")
    return max(float(np.sum(p[mask] * np.log(p[mask] / q[mask]))), 0.0)


def expected_gain(model: HypothesisModel, h: History, a: int) -> float:
    """g(a || h): expected KL gain of acting ``a`` after ``h``; the mutual information I(O; Theta | h a)."""
    _check_history(model, h)
    lik = model.likelihoods(h, a)
    pred = model.weights @ lik
    total = 0.0
    for o, p_o in enumerate(pred):
        if p_o <= 0.0:
            continue
        post = _normalize(model.weights * lik[:, o] / p_o)
        mask = post > 0
        total += p_o * float(np.sum(post[mask] * np.log(post[mask] / model.weights[mask])))
    return max(total, 0.0)


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.limit:
            raise ResourceError(f"tree search exceeded node budget {self.limit}")


def _precheck(model: HypothesisModel, tau: int, budget: int):
    if tau < 1:
        raise DomainError("tau must be >= 1")
    if (model.n_actions * model.n_observations) ** tau > budget:
        raise ResourceError(
            f"(n_o n_a)^tau = {(model.n_actions * model.n_observations) ** tau} exceeds node budget {budget}"
        )


def _q(model: HypothesisModel, h: History, a: int, tau: int, gamma: float, budget: _Budget) -> float:
    budget.spend()
    lik = model.likelihoods(h, a)
    pred = model.weights @ lik
    q = 0.0
    future = 0.0
    for o, p_o in enumerate(pred):
        if p_o <= 0.0:
            continue
        post = _normalize(model.weights * lik[:, o] / p_o)
        mask = post > 0
        q += p_o * float(np.sum(post[mask] * np.log(post[mask] / model.weights[mask])))
        if tau > 1:
            child = model.with_weights(post)
            hao = h + ((a, o),)
            future += p_o * max(_q(child, hao, b, tau - 1, gamma, budget) for b in range(model.n_actions))
    return max(q, 0.0) + gamma * future


def curiosity_q_discounted(
    model: HypothesisModel,
    h: History,
    a: int,
    tau: int,
    gamma: float,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """Optimal tau-step curiosity Q-value with discount ``gamma`` in [0, 1)."""
    if not 0.0 <= gamma < 1.0:
        raise DomainError("gamma must lie in [0, 1)")
    _check_history(model, h)
    model._check_action(a)
    _precheck(model, tau, node_budget)
    return _q(model, h, a, tau, gamma, _Budget(node_budget))


def curiosity_q_exact(
    model: HypothesisModel, h: History, a: int, tau: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> float:
    """Optimal undiscounted tau-step curiosity Q-value by backward induction."""
    _check_history(model, h)
    model._check_action(a)
    _precheck(model, tau, node_budget)
    return _q(model, h, a, tau, 1.0, _Budget(node_budget))


def curiosity_q_values(
    model: HypothesisModel,
    h: History,
    tau: int,
    gamma: Optional[float] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> np.ndarray:
    """Vector of optimal curiosity Q-values over all actions."""
    _check_history(model, h)
    _precheck(model, tau, node_budget)
    if gamma is None:
        g = 1.0
    elif 0.0 <= gamma < 1.0:
        g = gamma
    else:
        raise DomainError("gamma must lie in [0, 1)")
    budget = _Budget(node_budget * model.n_actions)
    return np.array([_q(model, h, a, tau, g, budget) for a in range(model.n_actions)])


def curiosity_v_exact(
    model: HypothesisModel, h: History, tau: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> float:
    return float(np.max(curiosity_q_values(model, h, tau, None, node_budget)))


def optimal_action(
    model: HypothesisModel,
    h: History,
    tau: int,
    gamma: Optional[float] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> int:
    """Lowest-index action maximizing the (discounted) curiosity Q-value."""
    return int(np.argmax(curiosity_q_values(model, h, tau, gamma, node_budget)))

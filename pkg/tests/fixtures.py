"""Small finite-hypothesis models shared by the planner tests.

Each fixture is (kernels, initial, prior) with kernels[theta][o_prev][a][o].
All use two actions and two observations.
"""

import numpy as np


def _kernel(p):
    """Kernel from P(o = 1 | o_prev, a) given as a 2x2 nested list."""
    k = np.zeros((2, 2, 2))
    for o_prev in range(2):
        for a in range(2):
            k[o_prev, a, 1] = p[o_prev][a]
            k[o_prev, a, 0] = 1.0 - p[o_prev][a]
    return k


FIXTURES = {
    "coin_pair": (
        [_kernel([[0.9, 0.5], [0.9, 0.5]]), _kernel([[0.1, 0.5], [0.1, 0.5]])],
        0,
        [0.5, 0.5],
    ),
    "skewed_prior": (
        [_kernel([[0.8, 0.3], [0.6, 0.2]]), _kernel([[0.3, 0.7], [0.5, 0.9]])],
        1,
        [0.7, 0.3],
    ),
    "three_way": (
        [
            _kernel([[0.9, 0.2], [0.4, 0.6]]),
            _kernel([[0.5, 0.5], [0.1, 0.8]]),
            _kernel([[0.2, 0.9], [0.7, 0.3]]),
        ],
        0,
        [0.5, 0.3, 0.2],
    ),
    "deterministic_split": (
        [_kernel([[1.0, 0.5], [1.0, 0.5]]), _kernel([[0.0, 0.5], [0.0, 0.5]]), _kernel([[0.5, 0.0], [0.5, 1.0]])],
        0,
        [1 / 3, 1 / 3, 1 / 3],
    ),
    # action 0 has the smaller one-step gain but moves the chain to where
    # action 1 separates the hypotheses sharply; found by exhaustive search
    "delayed_payoff": (
        [
            _kernel([[0.9, 0.4], [0.6, 0.0]]),
            _kernel([[0.7, 0.9], [0.8, 0.9]]),
        ],
        0,
        [0.5, 0.5],
    ),
}


def build(name):
    from curiosityq.bayes_core import HypothesisModel, MarkovHypothesis

    kernels, initial, prior = FIXTURES[name]
    model = HypothesisModel(tuple(MarkovHypothesis(k, initial) for k in kernels), np.array(prior), 2, 2)
    return model, kernels, initial, prior

"""Independent reference computations used by the tests.

Nothing here imports the package under test.
"""

from __future__ import annotations

import itertools
import math

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def digamma_series(x) -> float:
    """psi(x) = -gamma + sum_{n>=0} (1/(n+1) - 1/(n+x)), summed with series acceleration."""
    x = mp.mpf(x)
    tail = mp.nsum(lambda n: 1 / (n + 1) - 1 / (n + x), [0, mp.inf])
    return float(-mp.euler + tail)


def log_gamma_quadrature(x) -> float:
    """log of int_0^inf t^(x-1) e^-t dt by adaptive quadrature."""
    x = mp.mpf(x)
    return float(mp.log(mp.quad(lambda t: t ** (x - 1) * mp.exp(-t), [0, 1, mp.inf])))


def digamma_hp(x) -> mp.mpf:
    return mp.digamma(mp.mpf(float(x)))


def log_gamma_hp(x) -> mp.mpf:
    return mp.loggamma(mp.mpf(float(x)))


def f_alzer_hp(x) -> float:
    x = mp.mpf(float(x))
    return float(x * (mp.digamma(x + 1) - mp.log(x)))


def g_printed_form(n) -> float:
    """Expected gain via the log / digamma form, in high precision."""
    n = [mp.mpf(float(v)) for v in n]
    tot = sum(n)
    val = mp.log(tot) - mp.digamma(tot + 1)
    for v in n:
        val -= v / tot * (mp.log(v) - mp.digamma(v + 1))
    return float(val)


def kl_dirichlet_hp(a, b) -> float:
    a = [mp.mpf(float(v)) for v in a]
    b = [mp.mpf(float(v)) for v in b]
    a0, b0 = sum(a), sum(b)
    val = mp.loggamma(a0) - mp.loggamma(b0)
    for ai, bi in zip(a, b):
        val += -mp.loggamma(ai) + mp.loggamma(bi) + (ai - bi) * (mp.digamma(ai) - mp.digamma(a0))
    return float(val)


def mc_mutual_information(n, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte-Carlo I(Theta; X) for theta ~ Dir(n), X ~ Cat(theta).

    Returns (estimate, standard error). Each sample draws theta and then X;
    the summand is log p(X | theta) - log p(X).
    """
    n = np.asarray(n, dtype=float)
    theta = rng.dirichlet(n, size=samples)
    u = rng.random(samples)
    cdf = np.cumsum(theta, axis=1)
    x = np.minimum((cdf < u[:, None]).sum(axis=1), len(n) - 1)
    px = n[x] / n.sum()
    t = theta[np.arange(samples), x]
    vals = np.log(t) - np.log(px)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def mc_kl_dirichlet(a, b, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte-Carlo average of log Dir(theta; a) - log Dir(theta; b) under theta ~ Dir(a)."""
    from scipy.stats import dirichlet

    theta = rng.dirichlet(a, size=samples)
    theta = np.clip(theta, 1e-300, None)
    theta /= theta.sum(axis=1, keepdims=True)
    vals = dirichlet.logpdf(theta.T, a) - dirichlet.logpdf(theta.T, b)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


# ---------------------------------------------------------------------------
# Finite-hypothesis enumeration
# ---------------------------------------------------------------------------


def markov_lik(kernel, initial, history, a, o) -> float:
    last = history[-1][1] if history else initial
    return float(kernel[last][a][o])


def joint_weights(kernels, initial, prior, history):
    """Unnormalised p(theta) prod_t p(o_t | h_{<t} a_t; theta) straight from the product."""
    w = []
    for k, p0 in zip(kernels, prior):
        val = p0
        for i, (a, o) in enumerate(history):
            val *= markov_lik(k, initial, history[:i], a, o)
        w.append(val)
    return np.array(w, dtype=float)


def posterior(kernels, initial, prior, history):
    w = joint_weights(kernels, initial, prior, history)
    return w / w.sum()


def kl(p, q) -> float:
    m = p > 0
    return float(np.sum(p[m] * np.log(p[m] / q[m])))


def predictive(kernels, initial, prior, history, a, o) -> float:
    w = posterior(kernels, initial, prior, history)
    return float(sum(wi * markov_lik(k, initial, history, a, o) for wi, k in zip(w, kernels)))


def history_prob(kernels, initial, prior, base, extension) -> float:
    """p(extension observations | base, extension actions)."""
    full = joint_weights(kernels, initial, prior, base + extension).sum()
    return float(full / joint_weights(kernels, initial, prior, base).sum())


def expected_gain_enum(kernels, initial, prior, history, a, n_obs) -> float:
    ref = posterior(kernels, initial, prior, history)
    total = 0.0
    for o in range(n_obs):
        p = predictive(kernels, initial, prior, history, a, o)
        if p > 0:
            total += p * kl(posterior(kernels, initial, prior, history + ((a, o),)), ref)
    return total


def policy_trees(depth: int, n_actions: int, n_obs: int):
    """All deterministic policies over a depth-``depth`` decision tree.

    A tree is (action, {obs: subtree}); depth-1 trees are (action, None).
    """
    if depth == 1:
        for a in range(n_actions):
            yield (a, None)
        return
    subs = list(policy_trees(depth - 1, n_actions, n_obs))
    for a in range(n_actions):
        for combo in itertools.product(subs, repeat=n_obs):
            yield (a, dict(enumerate(combo)))


def policy_value_enum(kernels, initial, prior, history, tree, n_obs, gamma=1.0) -> float:
    """Expected discounted sum of one-step expected gains along ``tree``.

    For gamma = 1 this equals the expected KL of the final posterior from the
    root posterior; ``policy_value_kl`` computes that version directly.
    """
    a, children = tree
    val = expected_gain_enum(kernels, initial, prior, history, a, n_obs)
    if children is None:
        return val
    for o in range(n_obs):
        p = predictive(kernels, initial, prior, history, a, o)
        if p > 0:
            val += gamma * p * policy_value_enum(kernels, initial, prior, history + ((a, o),), children[o], n_obs, gamma)
    return val


def policy_value_kl(kernels, initial, prior, history, tree, n_obs) -> float:
    """E KL(p(theta | final history) || p(theta | history)) under ``tree``, by full-path enumeration."""
    ref = posterior(kernels, initial, prior, history)

    def walk(ext, node):
        a, children = node
        total = 0.0
        for o in range(n_obs):
            step = ext + ((a, o),)
            p = history_prob(kernels, initial, prior, history, step)
            if p == 0:
                continue
            if children is None:
                # outcome probability times KL of the leaf posterior from the root
                total += p * kl(posterior(kernels, initial, prior, history + step), ref)
            else:
                total += walk(step, children[o])
        return total

    return walk((), tree)


def optimal_value_bruteforce(kernels, initial, prior, history, depth, n_actions, n_obs, first_action=None) -> float:
    trees = policy_trees(depth, n_actions, n_obs)
    vals = [
        policy_value_kl(kernels, initial, prior, history, t, n_obs)
        for t in trees
        if first_action is None or t[0] == first_action
    ]
    return max(vals)


# ---------------------------------------------------------------------------
# MDP oracles
# ---------------------------------------------------------------------------


def value_iteration_dict(G, P, gamma, tol=1e-13, max_sweeps=10**6):
    """Gauss-Seidel value iteration over plain Python lists."""
    S, A = len(G), len(G[0])
    Q = [[0.0] * A for _ in range(S)]
    for _ in range(max_sweeps):
        delta = 0.0
        for s in range(S):
            for a in range(A):
                new = G[s][a] + gamma * sum(P[s][a][t] * max(Q[t]) for t in range(S))
                delta = max(delta, abs(new - Q[s][a]))
                Q[s][a] = new
        if delta < tol:
            return np.array(Q)
    raise RuntimeError("oracle value iteration did not converge")


def g_printed_float(row) -> float:
    from scipy.special import digamma as sp_digamma

    row = np.asarray(row, dtype=float)
    tot = row.sum()
    return float(math.log(tot) - sp_digamma(tot + 1) - np.sum(row / tot * (np.log(row) - sp_digamma(row + 1))))


def exact_q_tree(counts, s, a, gamma, tau) -> float:
    """Plain (unmemoised) recursion over the posterior-propagating tree using scipy digamma."""
    counts = np.array(counts, dtype=float)
    row = counts[s, a]
    val = g_printed_float(row) if row.size > 1 else 0.0
    if tau == 1:
        return val
    probs = row / row.sum()
    fut = 0.0
    for s2 in range(counts.shape[0]):
        nxt = counts.copy()
        nxt[s, a, s2] += 1.0
        fut += probs[s2] * max(exact_q_tree(nxt, s2, b, gamma, tau - 1) for b in range(counts.shape[1]))
    return val + gamma * fut

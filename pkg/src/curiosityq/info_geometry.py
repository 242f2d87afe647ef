"""Information geometry of Dirichlet densities.

Counts are pseudo-count vectors of a Dirichlet density over a finite outcome
set. All gains are in nats.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .special import digamma, f_alzer, log_gamma


def as_counts(n) -> np.ndarray:
    """Validate a Dirichlet pseudo-count vector and return it as a float array."""
    arr = np.asarray(n, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("Dirichlet counts must be a non-empty 1-d sequence")
    if not (np.all(np.isfinite(arr)) and np.all(arr > 0.0)):
        raise DomainError("Dirichlet counts must be finite and positive")
    if not math.isfinite(float(arr.sum())):
        raise DomainError("Dirichlet count total is not finite")
    return arr


def expected_info_gain(n) -> float:
    """Expected KL gain g(n) of one more observation under Dir(n).

    Uses g(n) = (sum_s f(n_s) - f(n*)) / n*, which is algebraically equal to
    log n* - psi(n* + 1) - sum_s (n_s / n*) (log n_s - psi(n_s + 1)) but has no
    large cancelling terms. Equals the mutual information between the
    Dirichlet parameter and the next categorical draw.
    """
    arr = as_counts(n)
    if arr.size == 1:
        return 0.0
    total = float(arr.sum())
    gain = (float(np.sum(f_alzer(arr))) - f_alzer(total)) / total
    return max(gain, 0.0)


def kl_dirichlet(post, prior) -> float:
    """KL(Dir(post) || Dir(prior)) in nats."""
    a = as_counts(post)
    b = as_counts(prior)
    if a.shape != b.shape:
        raise DomainError(f"length mismatch: {a.size} vs {b.size}")
    if np.array_equal(a, b):
        return 0.0
    a0 = float(a.sum())
    b0 = float(b.sum())
    # entries with a_i == b_i cancel exactly in both sums
    diff = a != b
    a, b = a[diff], b[diff]
    kl = (
        log_gamma(a0)
        - log_gamma(b0)
        - float(np.sum(log_gamma(a)))
        + float(np.sum(log_gamma(b)))
        + float(np.sum((a - b) * (digamma(a) - digamma(a0))))
    )
    return max(kl, 0.0)


def gain_bounds(prior, t: int) -> tuple[float, float]:
    """Data-independent (lower, upper) bounds on g after t more observations.

    Both bounds use the posterior total n0 + t in the denominator. They hold
    for every observation sequence, including the adversarial one that piles
    all t observations on the largest prior count.
    """
    arr = as_counts(prior)
    if arr.size < 2:
        raise DomainError("gain bounds need at least two outcomes")
    if t < 0:
        raise DomainError("t must be nonnegative")
    denom = 2.0 * (float(arr.sum()) + t)
    rest = np.delete(arr, int(np.argmax(arr)))
    lower = (float(np.sum(f_alzer(rest))) - f_alzer(float(rest.sum()))) / denom
    upper = (arr.size - 1) / denom
    return lower, upper


def gain_variation_bound(n, s: int) -> float:
    """Bound S / (2 n*^2) on (n_s / n*) |g(n + e_s) - g(n)|."""
    arr = as_counts(n)
    if not 0 <= s < arr.size:
        raise IndexError(f"outcome {s} out of range for {arr.size} outcomes")
    total = float(arr.sum())
    return arr.size / (2.0 * total * total)


def increment(n, s: int) -> np.ndarray:
    """Copy of n with entry s increased by one observation."""
    arr = as_counts(n).copy()
    if not 0 <= s < arr.size:
        raise IndexError(f"outcome {s} out of range for {arr.size} outcomes")
    arr[s] += 1.0
    return arr

"""Log-gamma, digamma and Alzer's function f(x) = x (psi(x + 1) - log x).

All three accept a Python float or a numpy array and return the same kind.
Arguments must be finite and strictly positive.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2, B_4, ..., B_18
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
)

_ASYMPTOTIC_START = 10.0
_STIRLING_START = 12.0


def _zeta_minus_one(k: int, cutoff: int = 30) -> float:
    """zeta(k) - 1 for integer k >= 2 by direct sum plus Euler-Maclaurin tail."""
    head = math.fsum(n ** -float(k) for n in range(2, cutoff))
    n = float(cutoff)
    tail = (
        n ** (1.0 - k) / (k - 1)
        + 0.5 * n ** -k
        + k * n ** (-k - 1) / 12.0
        - k * (k + 1) * (k + 2) * n ** (-k - 3) / 720.0
        + k * (k + 1) * (k + 2) * (k + 3) * (k + 4) * n ** (-k - 5) / 30240.0
    )
    return head + tail


# Taylor coefficients of lgamma(2 + z) = (1 - gamma) z + sum_k c_k z^k, |z| <= 1/2.
_LGAMMA2_COEFFS = tuple(
    (-1.0) ** k * _zeta_minus_one(k) / k for k in range(2, 30)
)


def _as_array(x, name: str) -> tuple[np.ndarray, bool]:
    scalar = np.isscalar(x) or np.ndim(x) == 0
    arr = np.asarray(x, dtype=float)
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr > 0.0)):
        raise DomainError(f"{name} requires finite x > 0")
    return arr, scalar


def _finish(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def _lgamma_near_two(z: np.ndarray) -> np.ndarray:
    if z.size == 0:
        return z
    acc = np.zeros_like(z)
    for c in reversed(_LGAMMA2_COEFFS):
        acc = (acc + c) * z
    return z * (1.0 - EULER_GAMMA) + acc * z


def _stirling_lgamma(x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    inv2 = inv * inv
    series = np.zeros_like(x)
    for k in range(len(_BERNOULLI_EVEN), 0, -1):
        b = _BERNOULLI_EVEN[k - 1]
        series = series * inv2 + b / (2 * k * (2 * k - 1))
    return (x - 0.5) * np.log(x) - x + _HALF_LOG_2PI + series * inv


def _check_scalar(x: float, name: str) -> float:
    x = float(x)
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError(f"{name} requires finite x > 0")
    return x


def _lgamma_near_two_scalar(z: float) -> float:
    acc = 0.0
    for c in reversed(_LGAMMA2_COEFFS):
        acc = (acc + c) * z
    return z * (1.0 - EULER_GAMMA) + acc * z


def _log_gamma_scalar(x: float) -> float:
    if x >= _STIRLING_START:
        inv = 1.0 / x
        inv2 = inv * inv
        series = 0.0
        for k in range(len(_BERNOULLI_EVEN), 0, -1):
            series = series * inv2 + _BERNOULLI_EVEN[k - 1] / (2 * k * (2 * k - 1))
        return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + series * inv
    if x >= 2.5:
        prod = 1.0
        while x >= 2.5:
            x -= 1.0
            prod *= x
        return _lgamma_near_two_scalar(x - 2.0) + math.log(prod)
    if x >= 1.5:
        return _lgamma_near_two_scalar(x - 2.0)
    if x >= 0.5:
        return _lgamma_near_two_scalar(x - 1.0) - math.log1p(x - 1.0)
    return _lgamma_near_two_scalar(x) - math.log1p(x) - math.log(x)


def _digamma_scalar(x: float) -> float:
    shift = 0.0
    while x < _ASYMPTOTIC_START:
        shift += 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for k in range(len(_BERNOULLI_EVEN), 0, -1):
        series = series * inv2 + _BERNOULLI_EVEN[k - 1] / (2 * k)
    return math.log(x) - 0.5 / x - series * inv2 - shift


def _f_alzer_scalar(x: float) -> float:
    if x < _ASYMPTOTIC_START:
        return x * (_digamma_scalar(x + 1.0) - math.log(x))
    inv2 = 1.0 / (x * x)
    series = 0.0
    for k in range(len(_BERNOULLI_EVEN), 0, -1):
        series = series * inv2 + _BERNOULLI_EVEN[k - 1] / (2 * k)
    return 0.5 - series / x


# below this length a Python loop over the scalar kernels beats masked numpy
_SMALL = 16


def _small_array(fn, x, name):
    arr = np.asarray(x, dtype=float)
    return np.array([fn(_check_scalar(v, name)) for v in arr.ravel()]).reshape(arr.shape)


def log_gamma(x):
    """Natural log of the gamma function for x > 0."""
    if np.ndim(x) == 0:
        return _log_gamma_scalar(_check_scalar(x, "log_gamma"))
    if np.size(x) <= _SMALL:
        return _small_array(_log_gamma_scalar, x, "log_gamma")
    arr, scalar = _as_array(x, "log_gamma")
    out = np.empty_like(arr)

    big = arr >= _STIRLING_START
    if big.all():
        return _finish(_stirling_lgamma(arr), scalar)
    out[big] = _stirling_lgamma(arr[big])

    mid = (arr >= 2.5) & ~big
    if mid.any():
        y = arr[mid].copy()
        prod = np.ones_like(y)
        while True:
            m = y >= 2.5
            if not m.any():
                break
            y[m] -= 1.0
            prod[m] *= y[m]
        out[mid] = _lgamma_near_two(y - 2.0) + np.log(prod)

    core = (arr >= 1.5) & (arr < 2.5)
    out[core] = _lgamma_near_two(arr[core] - 2.0)

    low = (arr >= 0.5) & (arr < 1.5)
    xl = arr[low]
    out[low] = _lgamma_near_two(xl - 1.0) - np.log1p(xl - 1.0)

    tiny = arr < 0.5
    xt = arr[tiny]
    # lgamma(x) = lgamma(x + 2) - log(x + 1) - log(x)
    out[tiny] = _lgamma_near_two(xt) - np.log1p(xt) - np.log(xt)
    return _finish(out, scalar)


def _digamma_asymptotic(y: np.ndarray) -> np.ndarray:
    inv2 = 1.0 / (y * y)
    series = np.zeros_like(y)
    for k in range(len(_BERNOULLI_EVEN), 0, -1):
        series = series * inv2 + _BERNOULLI_EVEN[k - 1] / (2 * k)
    return np.log(y) - 0.5 / y - series * inv2


def digamma(x):
    """Logarithmic derivative of the gamma function for x > 0."""
    if np.ndim(x) == 0:
        return _digamma_scalar(_check_scalar(x, "digamma"))
    if np.size(x) <= _SMALL:
        return _small_array(_digamma_scalar, x, "digamma")
    arr, scalar = _as_array(x, "digamma")
    y = arr.copy()
    shift = np.zeros_like(arr)
    while True:
        m = y < _ASYMPTOTIC_START
        if not m.any():
            break
        shift[m] += 1.0 / y[m]
        y[m] += 1.0
    out = _digamma_asymptotic(y) - shift
    return _finish(out, scalar)


def f_alzer(x):
    """f(x) = x (psi(x + 1) - log x), increasing from 0 to 1/2 on (0, inf)."""
    if np.ndim(x) == 0:
        return _f_alzer_scalar(_check_scalar(x, "f_alzer"))
    if np.size(x) <= _SMALL:
        return _small_array(_f_alzer_scalar, x, "f_alzer")
    arr, scalar = _as_array(x, "f_alzer")
    out = np.empty_like(arr)
    small = arr < _ASYMPTOTIC_START
    xs = arr[small]
    out[small] = xs * (digamma(xs + 1.0) - np.log(xs))
    # 1/2 - sum_k B_2k / (2k x^(2k-1)) avoids cancelling psi(x + 1) against log x.
    xb = arr[~small]
    inv2 = 1.0 / (xb * xb)
    series = np.zeros_like(xb)
    for k in range(len(_BERNOULLI_EVEN), 0, -1):
        series = series * inv2 + _BERNOULLI_EVEN[k - 1] / (2 * k)
    out[~small] = 0.5 - series / xb
    return _finish(out, scalar)

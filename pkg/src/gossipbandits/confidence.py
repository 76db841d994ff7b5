"""Bernoulli KL divergence, the exploration schedule, and upper-confidence
indices (KL and Hoeffding flavours)."""
from __future__ import annotations

import math
from dataclasses import dataclass

from numba import njit

BISECTION_TOL = 1e-9
BISECTION_MAX_ITER = 100


@dataclass(frozen=True)
class IndexKind:
    """Which confidence index to use and its exploration exponent."""
    kind: str  # "kl" or "hoeffding"
    alpha: float

    def __post_init__(self):
        if self.kind not in ("kl", "hoeffding"):
            raise ValueError(f"unknown index kind {self.kind!r}")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@njit(cache=True)
def _kl_bernoulli(p, q):
    if p == q:
        return 0.0
    if q <= 0.0 or q >= 1.0:
        return math.inf
    if p == 0.0:
        return -math.log(1.0 - q)
    if p == 1.0:
        return -math.log(q)
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))


@njit(cache=True)
def _f_alpha(t, alpha):
    lt = math.log(t)
    return 1.0 + t ** alpha * lt * lt


@njit(cache=True)
def _kl_ucb_bisect(mu_hat, threshold):
    """Largest u in [0, 1] with KL(mu_hat, u) <= threshold, by bisection."""
    if mu_hat >= 1.0:
        return 1.0
    if threshold <= 0.0:
        return mu_hat
    if mu_hat <= 0.0:
        h = 0.0
    else:
        h = mu_hat * math.log(mu_hat) + (1.0 - mu_hat) * math.log(1.0 - mu_hat)
    lo = mu_hat
    hi = 1.0
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if h - mu_hat * math.log(mid) - (1.0 - mu_hat) * math.log(1.0 - mid) <= threshold:
            lo = mid
        else:
            hi = mid
    return lo


def kl_bernoulli(p: float, q: float) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q); +inf when the
    second law is degenerate and differs from the first."""
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ValueError("KL arguments must lie in [0, 1]")
    return _kl_bernoulli(p, q)


def f_alpha(t: float, alpha: float) -> float:
    """Exploration budget 1 + t^alpha * ln(t)^2 (natural log)."""
    if t < 1:
        raise ValueError("time step must be >= 1")
    return _f_alpha(float(t), float(alpha))


def kl_ucb_index(mu_hat: float, pulls: int, t: float, alpha: float) -> float:
    """KL upper confidence bound for an arm; +inf for an unplayed arm."""
    if not 0.0 <= mu_hat <= 1.0:
        raise ValueError("empirical mean must lie in [0, 1]")
    if pulls < 0:
        raise ValueError("pull count must be nonnegative")
    if t < 1:
        raise ValueError("time step must be >= 1")
    if pulls == 0:
        return math.inf
    threshold = math.log(f_alpha(t, alpha)) / pulls
    return _kl_ucb_bisect(float(mu_hat), threshold)


def hoeffding_index(mu_hat: float, pulls: int, t: float, alpha: float) -> float:
    """Hoeffding upper confidence bound with the same exploration budget as
    the KL index; +inf for an unplayed arm, not clamped to 1."""
    if not 0.0 <= mu_hat <= 1.0:
        raise ValueError("empirical mean must lie in [0, 1]")
    if pulls < 0:
        raise ValueError("pull count must be nonnegative")
    if t < 1:
        raise ValueError("time step must be >= 1")
    if pulls == 0:
        return math.inf
    return mu_hat + math.sqrt(math.log(f_alpha(t, alpha)) / (2.0 * pulls))

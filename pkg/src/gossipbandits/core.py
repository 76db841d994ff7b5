"""Bandit problem instances, shared Bernoulli reward streams, and the
asymptotic reference constants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import TAG_REWARD, keyed_uniform_py
from .confidence import kl_bernoulli


@dataclass(frozen=True)
class ProblemInstance:
    """A Bernoulli bandit problem shared by N agents.

    Holds the arm means, the (unique) best arm, the per-arm gaps and the
    smallest positive gap.
    """
    num_agents: int
    means: tuple[float, ...]
    best_arm: int
    gaps: tuple[float, ...]
    delta_min: float

    @property
    def num_arms(self) -> int:
        return len(self.means)

    @property
    def mu_star(self) -> float:
        return self.means[self.best_arm]


def build_instance(means, num_agents: int) -> ProblemInstance:
    """Validate arm means and derive best arm, gaps and the minimum gap."""
    means = tuple(float(m) for m in means)
    if len(means) < 2:
        raise ValueError("need at least 2 arms")
    if num_agents < 1:
        raise ValueError("need at least 1 agent")
    if len(means) < num_agents:
        raise ValueError(f"need at least as many arms ({len(means)}) as agents ({num_agents})")
    for m in means:
        if not 0.0 <= m <= 1.0:
            raise ValueError(f"arm mean {m} outside [0, 1]")
    mu_star = max(means)
    if sum(1 for m in means if m == mu_star) > 1:
        raise ValueError("tied best arm: the maximum mean must be unique")
    best = means.index(mu_star)
    gaps = tuple(mu_star - m for m in means)
    delta_min = min(g for g in gaps if g > 0.0)
    return ProblemInstance(num_agents=num_agents, means=means, best_arm=best,
                           gaps=gaps, delta_min=delta_min)


def uniform_grid_means(mu_star: float, lo: float, hi: float, K: int) -> list[float]:
    """Best arm at ``mu_star`` plus K-1 equally spaced suboptimal means.

    The suboptimal means cover the closed interval between ``lo`` and ``hi``
    (either argument order is accepted) and are returned in descending order,
    so the second-best mean is the upper endpoint and the minimum gap is
    exactly ``mu_star`` minus that endpoint.  With K = 2 the single
    suboptimal mean sits at the upper endpoint.
    """
    if K < 2:
        raise ValueError("need at least 2 arms")
    a, b = (lo, hi) if lo <= hi else (hi, lo)
    if a == b:
        raise ValueError("grid endpoints must differ")
    if not 0.0 <= a <= 1.0 or not 0.0 <= b <= 1.0:
        raise ValueError("grid endpoints must lie in [0, 1]")
    if b >= mu_star:
        raise ValueError(f"grid upper endpoint {b} must be below the best mean {mu_star}")
    if K == 2:
        return [float(mu_star), float(b)]
    grid = np.linspace(b, a, K - 1)
    return [float(mu_star)] + [float(v) for v in grid]


@dataclass(frozen=True)
class RewardStream:
    """Deterministic Bernoulli reward source keyed by (run, agent, arm, pull).

    The reward for pull index s is a pure function of the master seed and the
    key, independent of play order, so every algorithm variant in an
    experiment sees the same bits.
    """
    master_seed: int
    means: tuple[float, ...] = field(default=())

    @staticmethod
    def for_instance(instance: ProblemInstance, master_seed: int) -> "RewardStream":
        return RewardStream(master_seed=master_seed, means=instance.means)

    def reward(self, run: int, n: int, k: int, s: int) -> int:
        if s < 1:
            raise ValueError("pull index starts at 1")
        if not 0 <= k < len(self.means):
            raise ValueError(f"arm {k} out of range")
        u = keyed_uniform_py(self.master_seed, TAG_REWARD, run, n, k, s)
        return 1 if u < self.means[k] else 0


def reward(stream: RewardStream, run: int, n: int, k: int, s: int) -> int:
    return stream.reward(run, n, k, s)


def _gap_over_kl(instance: ProblemInstance, k: int) -> float:
    kl = kl_bernoulli(instance.means[k], instance.mu_star)
    if math.isinf(kl):
        # limit of gap/KL as KL grows without bound
        return 0.0
    return instance.gaps[k] / kl


def lai_robbins_constant(instance: ProblemInstance) -> float:
    """Optimal asymptotic regret per log T over all consistent algorithms."""
    return sum(_gap_over_kl(instance, k)
               for k in range(instance.num_arms) if k != instance.best_arm)


def agent_asymptotic_constant(instance: ProblemInstance, sticky_set) -> float:
    """Asymptotic regret-per-log-T constant for one agent's sticky set."""
    for k in sticky_set:
        if not 0 <= k < instance.num_arms:
            raise ValueError(f"arm {k} out of range")
    return sum(_gap_over_kl(instance, k)
               for k in sorted(sticky_set) if k != instance.best_arm)

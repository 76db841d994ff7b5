"""Per-agent policy state machine: UCB arm selection over the active set,
statistics updates, most-played tracking and end-of-phase active-set rules."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .confidence import IndexKind, f_alpha, hoeffding_index, kl_ucb_index


@dataclass(frozen=True)
class PolicyKind:
    """Active-set update rule plus the confidence index it selects with."""
    update_rule: str  # "aogb" or "gosine"
    index: IndexKind
    gosine_cap: int = 2  # max non-sticky arms kept by the gosine rule

    def __post_init__(self):
        if self.update_rule not in ("aogb", "gosine"):
            raise ValueError(f"unknown update rule {self.update_rule!r}")
        if self.gosine_cap < 1:
            raise ValueError("gosine cap must be at least 1")


@dataclass
class AgentState:
    """One agent's sticky/active sets, per-arm statistics and phase counters.

    Single-owner mutable state: the update operations mutate in place and
    return the state for convenience.
    """
    agent_id: int
    sticky_set: frozenset
    active_set: set
    total_pulls: np.ndarray
    reward_sums: np.ndarray
    phase_pulls: np.ndarray
    phase_index: int = 1

    @staticmethod
    def initial(agent_id: int, sticky_set, num_arms: int) -> "AgentState":
        sticky = frozenset(int(k) for k in sticky_set)
        if not sticky:
            raise ValueError("sticky set must be nonempty")
        for k in sticky:
            if not 0 <= k < num_arms:
                raise ValueError(f"sticky arm {k} out of range")
        return AgentState(
            agent_id=agent_id,
            sticky_set=sticky,
            active_set=set(sticky),
            total_pulls=np.zeros(num_arms, dtype=np.int64),
            reward_sums=np.zeros(num_arms, dtype=np.int64),
            phase_pulls=np.zeros(num_arms, dtype=np.int64),
        )

    @property
    def num_arms(self) -> int:
        return len(self.total_pulls)

    def mean(self, arm: int) -> float:
        pulls = self.total_pulls[arm]
        return float(self.reward_sums[arm]) / pulls if pulls else 0.0


def _index(state: AgentState, arm: int, t: int, kind: IndexKind) -> float:
    pulls = int(state.total_pulls[arm])
    if kind.kind == "kl":
        return kl_ucb_index(state.mean(arm), pulls, t, kind.alpha)
    return hoeffding_index(state.mean(arm), pulls, t, kind.alpha)


def select_arm(state: AgentState, t: int, kind: IndexKind) -> int:
    """Arm in the active set maximizing the configured index at time t;
    ties (including all-infinite) broken by lowest arm id."""
    if not state.active_set:
        raise RuntimeError("active set is empty")
    best_arm = -1
    best_val = -math.inf
    for arm in sorted(state.active_set):
        val = _index(state, arm, t, kind)
        if val > best_val:
            best_val = val
            best_arm = arm
    return best_arm


def observe(state: AgentState, arm: int, reward: int) -> AgentState:
    """Record one reward for the arm just played."""
    state.total_pulls[arm] += 1
    state.phase_pulls[arm] += 1
    state.reward_sums[arm] += reward
    return state


def most_played_in_phase(state: AgentState) -> int:
    """Arm with the most pulls this phase (the agent's recommendation);
    ties broken by lowest arm id."""
    best_arm = -1
    best_val = -1
    for arm in sorted(state.active_set):
        if state.phase_pulls[arm] > best_val:
            best_val = int(state.phase_pulls[arm])
            best_arm = arm
    return best_arm


def end_phase_update(state: AgentState, recommendation: int, policy: PolicyKind) -> AgentState:
    """Apply the end-of-phase active-set rule, then reset phase counters.

    Statistics of arms leaving the active set are retained.
    """
    if not 0 <= recommendation < state.num_arms:
        raise ValueError(f"recommendation {recommendation} out of range")
    most_played = most_played_in_phase(state)
    if policy.update_rule == "aogb":
        state.active_set = set(state.sticky_set) | {recommendation, most_played}
    else:
        _gosine_update(state, recommendation, policy.gosine_cap)
    state.phase_pulls[:] = 0
    state.phase_index += 1
    return state


def _gosine_update(state: AgentState, recommendation: int, cap: int) -> None:
    # insert the recommendation if new, then trim the least-played non-sticky
    # arms (the fresh recommendation itself is not eligible for removal)
    if recommendation in state.active_set:
        return
    state.active_set.add(recommendation)
    while True:
        non_sticky = [k for k in state.active_set if k not in state.sticky_set]
        if len(non_sticky) <= cap:
            return
        removable = [k for k in non_sticky if k != recommendation]
        if not removable:
            return
        victim = min(removable, key=lambda k: (int(state.total_pulls[k]), k))
        state.active_set.discard(victim)

"""Synchronous round engine: phase schedules, the full play/gossip loop,
regret accounting and trace diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernel
from ._rng import TAG_GOSSIP, keyed_uniform_py
from .agent import AgentState, PolicyKind, end_phase_update, most_played_in_phase, observe, select_arm
from .core import ProblemInstance, RewardStream
from .network import GossipMatrix, is_strongly_connected, neighbor_from_uniform


def phase_boundary(j: int, theta: float) -> int:
    """End of phase j: round(j^(theta+1)), exactly j^3 for theta = 2."""
    if theta <= 0:
        raise ValueError("phase growth exponent must be positive")
    if j < 0:
        raise ValueError("phase index must be nonnegative")
    if j == 0:
        return 0
    exponent = theta + 1.0
    if exponent.is_integer():
        return j ** int(exponent)
    return int(round(j ** exponent))


@dataclass(frozen=True)
class PhaseSchedule:
    """Strictly increasing phase boundaries A_j with polynomial growth."""
    theta: float

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("phase growth exponent must be positive")

    def boundary(self, j: int) -> int:
        return phase_boundary(j, self.theta)

    def boundaries_through(self, T: int) -> np.ndarray:
        """[A_0, A_1, ...] up to the first boundary >= T."""
        bounds = [0]
        j = 1
        while bounds[-1] < T:
            nxt = self.boundary(j)
            if nxt <= bounds[-1]:
                raise ValueError("phase boundaries must be strictly increasing")
            bounds.append(nxt)
            j += 1
        return np.asarray(bounds, dtype=np.int64)

    def sandwich_constant(self, j_max: int) -> float:
        """Smallest C >= 1 with j^theta / C <= A_j - A_{j-1} <= C j^theta
        over 1 <= j <= j_max."""
        js = np.arange(1, j_max + 1, dtype=np.float64)
        bounds = np.array([self.boundary(j) for j in range(j_max + 1)], dtype=np.float64)
        increments = np.diff(bounds)
        if np.any(increments <= 0):
            raise ValueError("phase boundaries must be strictly increasing")
        ratio = increments / js ** self.theta
        return float(max(1.0, ratio.max(), (1.0 / ratio).max()))

    def validate_growth(self, j_max: int, C: float) -> bool:
        return C >= 1.0 and self.sandwich_constant(j_max) <= C


def partition_sticky_sets(K: int, N: int) -> list[frozenset]:
    """Contiguous near-equal blocks covering the K arms, one per agent."""
    if K < N:
        raise ValueError("need at least as many arms as agents")
    if N < 1:
        raise ValueError("need at least one agent")
    base, extra = divmod(K, N)
    sets = []
    start = 0
    for n in range(N):
        size = base + (1 if n < extra else 0)
        sets.append(frozenset(range(start, start + size)))
        start += size
    return sets


@dataclass
class RunTrace:
    """Diagnostics of one Monte Carlo run."""
    grid_times: np.ndarray                 # sample times, last entry is T
    regret_grid: np.ndarray                # (N, G) cumulative pseudo-regret
    realized_regret_final: np.ndarray      # (N,) T*mu_star - total reward
    active_set_log: list                   # per phase (from 1), per agent frozenset
    recommendations_log: np.ndarray        # (fired boundaries, N) most-played M
    received_log: np.ndarray               # (fired boundaries, N) received O
    stabilization_phase: Optional[int]
    first_spread_phase: list               # per agent; 0 for the sticky owner
    final_pulls: np.ndarray                # (N, K) total pull counts at T


def default_grid(T: int) -> np.ndarray:
    stride = max(1, math.ceil(T / 1000))
    times = list(range(stride, T + 1, stride))
    if not times or times[-1] != T:
        times.append(T)
    return np.asarray(times, dtype=np.int64)


def detect_stabilization(active_set_log, sticky_sets, best_arm) -> Optional[int]:
    """Smallest j0 such that every later logged phase has every agent's
    active set equal to its sticky set plus the best arm; None if the last
    logged phase is not in that state."""
    targets = [frozenset(s) | {best_arm} for s in sticky_sets]
    num_phases = len(active_set_log)
    last_bad = 0
    for j in range(1, num_phases + 1):
        sets = active_set_log[j - 1]
        if any(frozenset(sets[n]) != targets[n] for n in range(len(targets))):
            last_bad = j
    if num_phases == 0 or last_bad == num_phases:
        return None
    return last_bad


def detect_first_spread(active_set_log, best_arm) -> list:
    """Per agent, the first phase whose active set contains the best arm;
    0 for agents holding it from the start, None if it never arrives."""
    if not active_set_log:
        return []
    num_agents = len(active_set_log[0])
    result: list = []
    for n in range(num_agents):
        if best_arm in active_set_log[0][n]:
            result.append(0)
            continue
        found = None
        for j in range(1, len(active_set_log) + 1):
            if best_arm in active_set_log[j - 1][n]:
                found = j
                break
        result.append(found)
    return result


def _check_run_args(instance: ProblemInstance, P: GossipMatrix, T: int,
                    stream: RewardStream) -> None:
    if T < 1:
        raise ValueError("horizon must be at least 1")
    if P.size != instance.num_agents:
        raise ValueError("gossip matrix size must match the agent count")
    if not is_strongly_connected(P):
        raise ValueError("gossip matrix must be strongly connected")
    if tuple(stream.means) != tuple(instance.means):
        raise ValueError("reward stream was built for a different instance")


def _finish_trace(instance: ProblemInstance, sticky_sets, T, grid, out, realized,
                  act_log, m_log, o_log, n_phases, n_fired, pulls) -> RunTrace:
    active_log = [
        [frozenset(np.flatnonzero(act_log[j, n]).tolist())
         for n in range(instance.num_agents)]
        for j in range(n_phases)
    ]
    realized_regret = T * instance.mu_star - np.asarray(realized, dtype=np.float64)
    return RunTrace(
        grid_times=grid,
        regret_grid=np.asarray(out, dtype=np.float64),
        realized_regret_final=realized_regret,
        active_set_log=active_log,
        recommendations_log=np.asarray(m_log[:n_fired]),
        received_log=np.asarray(o_log[:n_fired]),
        stabilization_phase=detect_stabilization(active_log, sticky_sets, instance.best_arm),
        first_spread_phase=detect_first_spread(active_log, instance.best_arm),
        final_pulls=np.asarray(pulls),
    )


def run_single(instance: ProblemInstance, P: GossipMatrix, policy: PolicyKind,
               schedule: PhaseSchedule, T: int, run_id: int,
               stream: RewardStream, grid: Optional[np.ndarray] = None) -> RunTrace:
    """One deterministic run of the full synchronous protocol."""
    _check_run_args(instance, P, T, stream)
    N, K = instance.num_agents, instance.num_arms
    sticky_sets = partition_sticky_sets(K, N)
    sticky = np.zeros((N, K), dtype=np.bool_)
    for n, s in enumerate(sticky_sets):
        for k in s:
            sticky[n, k] = True
    boundaries = schedule.boundaries_through(T)
    grid = default_grid(T) if grid is None else np.asarray(grid, dtype=np.int64)
    out, _, realized, act_log, m_log, o_log, n_phases, pulls = _kernel.simulate(
        np.asarray(instance.means, dtype=np.float64),
        np.asarray(instance.gaps, dtype=np.float64),
        P.rows,
        sticky,
        0 if policy.update_rule == "aogb" else 1,
        policy.index.kind == "kl",
        float(policy.index.alpha),
        policy.gosine_cap,
        boundaries,
        int(T),
        int(run_id),
        np.uint64(stream.master_seed),
        grid,
    )
    n_fired = int(np.count_nonzero(boundaries[1:] <= T))
    return _finish_trace(instance, sticky_sets, T, grid, out, realized,
                         act_log, m_log, o_log, n_phases, n_fired, pulls)


def run_single_reference(instance: ProblemInstance, P: GossipMatrix, policy: PolicyKind,
                         schedule: PhaseSchedule, T: int, run_id: int,
                         stream: RewardStream, grid: Optional[np.ndarray] = None) -> RunTrace:
    """Plain-Python engine with identical semantics; the oracle the compiled
    engine is cross-checked against."""
    _check_run_args(instance, P, T, stream)
    N, K = instance.num_agents, instance.num_arms
    sticky_sets = partition_sticky_sets(K, N)
    states = [AgentState.initial(n, sticky_sets[n], K) for n in range(N)]
    boundaries = schedule.boundaries_through(T)
    grid = default_grid(T) if grid is None else np.asarray(grid, dtype=np.int64)

    max_phases = len(boundaries) - 1
    act_log = np.zeros((max_phases, N, K), dtype=np.bool_)
    m_log = np.full((max_phases, N), -1, dtype=np.int64)
    o_log = np.full((max_phases, N), -1, dtype=np.int64)
    for n in range(N):
        for k in states[n].active_set:
            act_log[0, n, k] = True
    n_phases = 1

    out = np.zeros((N, len(grid)))
    pseudo = [0.0] * N
    realized = [0] * N
    j = 1
    gi = 0
    for t in range(1, T + 1):
        for n in range(N):
            arm = select_arm(states[n], t, policy.index)
            s = int(states[n].total_pulls[arm]) + 1
            x = stream.reward(run_id, n, arm, s)
            observe(states[n], arm, x)
            pseudo[n] += instance.gaps[arm]
            realized[n] += x
        if gi < len(grid) and t == grid[gi]:
            for n in range(N):
                out[n, gi] = pseudo[n]
            gi += 1
        if j < len(boundaries) and t == boundaries[j]:
            most = [most_played_in_phase(states[n]) for n in range(N)]
            recs = []
            for n in range(N):
                u = keyed_uniform_py(stream.master_seed, TAG_GOSSIP, run_id, n, j, 0)
                recs.append(most[neighbor_from_uniform(P, n, u)])
            for n in range(N):
                end_phase_update(states[n], recs[n], policy)
            m_log[j - 1] = most
            o_log[j - 1] = recs
            if t < T and j < max_phases:
                for n in range(N):
                    for k in states[n].active_set:
                        act_log[j, n, k] = True
                n_phases = j + 1
            j += 1
    n_fired = int(np.count_nonzero(boundaries[1:] <= T))
    pulls = np.stack([s.total_pulls for s in states])
    return _finish_trace(instance, sticky_sets, T, grid, out, realized,
                         act_log, m_log, o_log, n_phases, n_fired, pulls)

"""Compiled single-run engine.

Semantically identical to the plain-Python reference loop in
``simulator.run_single_reference`` (the test suite checks trace equality),
but fast enough for the Monte Carlo sweeps: arm selection under the KL index
keeps certified lower/upper brackets per arm (cached across steps while the
pull count is unchanged, since the index is nondecreasing in t) and only
tightens a bracket by predicate bisection when brackets of competing arms
overlap.  The argmax it returns is the argmax of the exact indices whenever
the top two indices differ by more than ~1e-12.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from ._rng import TAG_GOSSIP, TAG_REWARD, keyed_uniform
from .confidence import _f_alpha, _kl_ucb_bisect

_MAX_REFINE = 220
# bracket decisions need this much separation to be provably consistent with
# the canonical 1e-9-tolerance bisection; anything closer falls back to it
_MARGIN = 2e-9
_FLOOR = 1e-10


@njit(cache=True, inline="always")
def _entropy(mu):
    if mu <= 0.0 or mu >= 1.0:
        return 0.0
    return mu * math.log(mu) + (1.0 - mu) * math.log(1.0 - mu)


@njit(cache=True)
def _select_kl(active, pulls, rsum, c, clb, cub, cthr, cpulls):
    """Argmax of the KL-UCB index over the active set, ties to lowest id."""
    K = active.shape[0]
    for k in range(K):
        if active[k] and pulls[k] == 0:
            return k
    win = -1
    wlb = 0.0
    wub = 0.0
    wmu = 0.0
    wthr = 0.0
    wh = 0.0
    wref = False
    for k in range(K):
        if not active[k]:
            continue
        V = pulls[k]
        S = rsum[k]
        mu = S / V
        thr = c / V
        if S == V:
            lb = 1.0
            ub = 1.0
        elif thr <= 0.0:
            lb = mu
            ub = mu
        else:
            # Pinsker gives index <= mu + sqrt(thr / 2)
            ub = mu + math.sqrt(0.5 * thr)
            if ub > 1.0:
                ub = 1.0
            lb = mu
            if cpulls[k] == V and cthr[k] <= thr:
                # cached bracket from an earlier step at the same pull count;
                # the index grew by at most (thr - thr0) / KL'(mu, clb)
                if clb[k] > lb:
                    lb = clb[k]
                d = clb[k] - mu
                if cub[k] < 1.0 and d > 1e-12:
                    u2 = cub[k] + (thr - cthr[k]) * (clb[k] * (1.0 - clb[k])) / d
                    if u2 < ub:
                        ub = u2
        if win < 0:
            win = k
            wlb = lb
            wub = ub
            wmu = mu
            wthr = thr
            wref = False
            continue
        h = 0.0
        kref = False
        take = False
        decided = False
        for _ in range(_MAX_REFINE):
            if ub <= wlb - _MARGIN:
                decided = True
                break
            if lb >= wub + _MARGIN:
                take = True
                decided = True
                break
            if (wub - wlb) <= _FLOOR and (ub - lb) <= _FLOOR:
                break
            if (wub - wlb) >= (ub - lb):
                if not wref:
                    wh = _entropy(wmu)
                    wref = True
                mid = 0.5 * (wlb + wub)
                if wh - wmu * math.log(mid) - (1.0 - wmu) * math.log(1.0 - mid) <= wthr:
                    wlb = mid
                else:
                    wub = mid
            else:
                if not kref:
                    h = _entropy(mu)
                    kref = True
                mid = 0.5 * (lb + ub)
                if h - mu * math.log(mid) - (1.0 - mu) * math.log(1.0 - mid) <= thr:
                    lb = mid
                else:
                    ub = mid
        if not decided:
            # near tie: defer to the canonical bisection defining the index
            if mu == wmu and thr == wthr:
                take = False
            else:
                take = _kl_ucb_bisect(mu, thr) > _kl_ucb_bisect(wmu, wthr)
        if wref:
            clb[win] = wlb
            cub[win] = wub
            cthr[win] = wthr
            cpulls[win] = pulls[win]
            wref = False
        if kref:
            clb[k] = lb
            cub[k] = ub
            cthr[k] = thr
            cpulls[k] = V
        if take:
            win = k
            wlb = lb
            wub = ub
            wmu = mu
            wthr = thr
    return win


@njit(cache=True)
def _select_hoeffding(active, pulls, rsum, c):
    K = active.shape[0]
    best = -1.0
    win = -1
    for k in range(K):
        if not active[k]:
            continue
        V = pulls[k]
        if V == 0:
            return k
        idx = rsum[k] / V + math.sqrt(c / (2.0 * V))
        if idx > best:
            best = idx
            win = k
    return win


@njit(cache=True)
def _most_played(active, phase_pulls):
    K = active.shape[0]
    best = np.int64(-1)
    win = -1
    for k in range(K):
        if active[k] and phase_pulls[k] > best:
            best = phase_pulls[k]
            win = k
    return win


@njit(cache=True)
def _sample_neighbor_keyed(P, n, seed, run_id, phase):
    u = keyed_uniform(seed, TAG_GOSSIP, run_id, n, phase, 0)
    N = P.shape[0]
    acc = 0.0
    for q in range(N):
        acc += P[n, q]
        if u < acc:
            return q
    for q in range(N - 1, -1, -1):
        if P[n, q] > 0.0:
            return q
    return n


@njit(cache=True)
def _apply_update(act, sticky, pulls, most_played, recommendation, update_rule, cap):
    K = act.shape[0]
    if update_rule == 0:  # fast elimination: sticky + {O, M}
        for k in range(K):
            act[k] = sticky[k]
        act[most_played] = True
        act[recommendation] = True
    else:  # gosine: insert O, trim least-played non-sticky arms beyond cap
        if not act[recommendation]:
            act[recommendation] = True
            while True:
                count = 0
                for k in range(K):
                    if act[k] and not sticky[k]:
                        count += 1
                if count <= cap:
                    break
                victim = -1
                victim_pulls = np.int64(0)
                for k in range(K):
                    if act[k] and not sticky[k] and k != recommendation:
                        if victim < 0 or pulls[k] < victim_pulls:
                            victim = k
                            victim_pulls = pulls[k]
                if victim < 0:
                    break
                act[victim] = False


@njit(cache=True)
def simulate(means, gaps, P, sticky, update_rule, index_is_kl, alpha, cap,
             boundaries, T, run_id, seed, grid_times):
    N = P.shape[0]
    K = means.shape[0]
    n_bounds = boundaries.shape[0]
    max_phases = n_bounds - 1

    pulls = np.zeros((N, K), np.int64)
    rsum = np.zeros((N, K), np.int64)
    ppulls = np.zeros((N, K), np.int64)
    active = np.zeros((N, K), np.bool_)
    for n in range(N):
        for k in range(K):
            active[n, k] = sticky[n, k]
    clb = np.zeros((N, K))
    cub = np.zeros((N, K))
    cthr = np.zeros((N, K))
    cpulls = np.full((N, K), -1, np.int64)

    G = grid_times.shape[0]
    out = np.zeros((N, G))
    pseudo = np.zeros(N)
    realized = np.zeros(N, np.int64)
    act_log = np.zeros((max_phases, N, K), np.bool_)
    m_log = np.full((max_phases, N), -1, np.int64)
    o_log = np.full((max_phases, N), -1, np.int64)
    for n in range(N):
        for k in range(K):
            act_log[0, n, k] = active[n, k]
    n_phases = 1
    m_buf = np.empty(N, np.int64)
    o_buf = np.empty(N, np.int64)
    j = 1
    gi = 0
    for t in range(1, T + 1):
        c = math.log(_f_alpha(1.0 * t, alpha))
        for n in range(N):
            if index_is_kl:
                a = _select_kl(active[n], pulls[n], rsum[n], c,
                               clb[n], cub[n], cthr[n], cpulls[n])
            else:
                a = _select_hoeffding(active[n], pulls[n], rsum[n], c)
            s = pulls[n, a] + 1
            u = keyed_uniform(seed, TAG_REWARD, run_id, n, a, s)
            x = 1 if u < means[a] else 0
            pulls[n, a] = s
            ppulls[n, a] += 1
            rsum[n, a] += x
            pseudo[n] += gaps[a]
            realized[n] += x
        if gi < G and t == grid_times[gi]:
            for n in range(N):
                out[n, gi] = pseudo[n]
            gi += 1
        if j < n_bounds and t == boundaries[j]:
            for n in range(N):
                m_buf[n] = _most_played(active[n], ppulls[n])
            for n in range(N):
                q = _sample_neighbor_keyed(P, n, seed, run_id, j)
                o_buf[n] = m_buf[q]
            for n in range(N):
                _apply_update(active[n], sticky[n], pulls[n],
                              m_buf[n], o_buf[n], update_rule, cap)
                for k in range(K):
                    ppulls[n, k] = 0
            m_log[j - 1] = m_buf
            o_log[j - 1] = o_buf
            if t < T and j < max_phases:
                for n in range(N):
                    for k in range(K):
                        act_log[j, n, k] = active[n, k]
                n_phases = j + 1
            j += 1
    return out, pseudo, realized, act_log, m_log, o_log, n_phases, pulls

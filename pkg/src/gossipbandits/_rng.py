"""Counter-based pseudorandom function used for all stochastic draws.

Every random quantity in a run is a pure function of a 64-bit master seed
plus an integer key, so repeated queries and arbitrary query orders give
identical results, and all algorithm variants sharing a seed see the same
reward bits.
"""
from __future__ import annotations

import numpy as np
from numba import njit

TAG_REWARD = 1
TAG_GOSSIP = 2

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _mix(z):
    # splitmix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def keyed_uniform(seed, tag, a, b, c, d):
    """Uniform in [0, 1) keyed by (seed, tag, a, b, c, d)."""
    z = np.uint64(seed)
    z = _mix(z + _GAMMA * (np.uint64(tag) + np.uint64(1)))
    z = _mix(z + _GAMMA * (np.uint64(a) + np.uint64(1)))
    z = _mix(z + _GAMMA * (np.uint64(b) + np.uint64(1)))
    z = _mix(z + _GAMMA * (np.uint64(c) + np.uint64(1)))
    z = _mix(z + _GAMMA * (np.uint64(d) + np.uint64(1)))
    z = _mix(z)
    return (z >> np.uint64(11)) * _INV_2_53


def keyed_uniform_py(seed: int, tag: int, a: int, b: int, c: int, d: int) -> float:
    """Python-friendly wrapper (accepts plain ints, validates the seed range)."""
    if not 0 <= seed < 2**64:
        raise ValueError("master seed must fit in 64 bits")
    return keyed_uniform(np.uint64(seed), np.uint64(tag), np.uint64(a),
                         np.uint64(b), np.uint64(c), np.uint64(d))

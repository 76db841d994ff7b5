"""Gossip communication matrices: builders, neighbor sampling, and the graph
metrics (strong connectivity, diameter, smallest positive entry)."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class GossipMatrix:
    """Row-stochastic N x N matrix; entry (n, q) is the probability that
    agent n pulls its per-phase recommendation from agent q."""
    rows: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.rows, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("gossip matrix must be square")
        n = p.shape[0]
        if n < 1:
            raise ValueError("gossip matrix must be nonempty")
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("gossip matrix entries must lie in [0, 1]")
        if np.any(np.abs(p.sum(axis=1) - 1.0) > ROW_SUM_TOL):
            raise ValueError("gossip matrix rows must sum to 1")
        # agents never ask themselves; the 1x1 case degenerates to self-gossip
        if n > 1 and np.any(np.diag(p) != 0.0):
            raise ValueError("gossip matrix diagonal must be zero")
        p.setflags(write=False)
        object.__setattr__(self, "rows", p)

    @property
    def size(self) -> int:
        return self.rows.shape[0]


def complete_graph(N: int) -> GossipMatrix:
    """Every agent gossips uniformly over the other N-1 agents."""
    if N < 2:
        raise ValueError("complete graph needs at least 2 agents")
    p = np.full((N, N), 1.0 / (N - 1))
    np.fill_diagonal(p, 0.0)
    return GossipMatrix(p)


def cycle_graph(N: int) -> GossipMatrix:
    """Every agent gossips with its two ring neighbors, probability 1/2 each."""
    if N < 3:
        raise ValueError("cycle graph needs at least 3 agents")
    p = np.zeros((N, N))
    for n in range(N):
        p[n, (n - 1) % N] += 0.5
        p[n, (n + 1) % N] += 0.5
    return GossipMatrix(p)


def star_graph(N: int, center: int = 0) -> GossipMatrix:
    """Leaves always gossip with the center; the center gossips uniformly
    over the leaves."""
    if N < 3:
        raise ValueError("star graph needs at least 3 agents")
    if not 0 <= center < N:
        raise ValueError("star center out of range")
    p = np.zeros((N, N))
    for n in range(N):
        if n == center:
            for q in range(N):
                if q != center:
                    p[n, q] = 1.0 / (N - 1)
        else:
            p[n, center] = 1.0
    return GossipMatrix(p)


def neighbor_from_uniform(P: GossipMatrix, n: int, u: float) -> int:
    """Inverse-CDF lookup in row n at a uniform draw u in [0, 1)."""
    row = P.rows[n]
    acc = 0.0
    for q in range(P.size):
        acc += row[q]
        if u < acc:
            return q
    # row sums can fall a hair below 1; fall back to the last positive entry
    for q in range(P.size - 1, -1, -1):
        if row[q] > 0.0:
            return q
    raise ValueError("gossip matrix row is all zero")


def sample_neighbor(P: GossipMatrix, n: int, rng: np.random.Generator) -> int:
    """Sample a gossip partner q ~ P(n, .), advancing the supplied rng."""
    return neighbor_from_uniform(P, n, rng.random())


def _bfs_dists(adj: list[list[int]], src: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[src] = 0
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def _adjacency(P: GossipMatrix, transpose: bool = False) -> list[list[int]]:
    p = P.rows.T if transpose else P.rows
    return [[q for q in range(P.size) if p[n, q] > 0.0] for n in range(P.size)]


def is_strongly_connected(P: GossipMatrix) -> bool:
    """True iff the directed positive-entry graph is strongly connected."""
    if P.size == 1:
        return True
    for transpose in (False, True):
        dist = _bfs_dists(_adjacency(P, transpose), 0)
        if any(d < 0 for d in dist):
            return False
    return True


def diameter(P: GossipMatrix) -> int:
    """Largest shortest-path length between distinct nodes in the directed
    positive-entry graph; requires strong connectivity."""
    if not is_strongly_connected(P):
        raise ValueError("diameter requires a strongly connected gossip graph")
    adj = _adjacency(P)
    best = 0
    for src in range(P.size):
        dist = _bfs_dists(adj, src)
        for v, d in enumerate(dist):
            if v != src and d > best:
                best = d
    return best


def p_min(P: GossipMatrix) -> float:
    """Smallest positive entry of the gossip matrix."""
    positive = P.rows[P.rows > 0.0]
    if positive.size == 0:
        raise ValueError("gossip matrix has no positive entries")
    return float(positive.min())


def load_matrix_csv(path) -> GossipMatrix:
    """Load a dense N x N gossip matrix from a CSV of N comma-separated rows."""
    rows = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return GossipMatrix(rows)

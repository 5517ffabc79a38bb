"""Independent oracles and random instance generators for the tests."""

import itertools
import random

import numpy as np

from graphcodes.capacity import SimpleGraph


def random_graph(n, prob, seed):
    rng = random.Random(seed)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < prob]
    return SimpleGraph.from_edges(n, edges)


def random_connected_graph(n, prob, seed):
    """Random spanning tree plus independent extra edges."""
    rng = random.Random(seed)
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    for e in itertools.combinations(range(n), 2):
        if rng.random() < prob:
            edges.add(e)
    return SimpleGraph.from_edges(n, sorted(edges))


def brute_force_alpha(g):
    """Largest vertex subset with no internal edge, by scanning all 2^n subsets."""
    best = 0
    adj = g.adjacency
    for mask in range(1 << g.n):
        size = mask.bit_count()
        if size <= best:
            continue
        if all(not (adj[v] & mask) for v in range(g.n) if (mask >> v) & 1):
            best = size
    return best


def dense_rank_gf2(arr):
    """Rank over GF(2) by elimination on a dense 0/1 array."""
    a = np.array(arr, dtype=np.uint8) & 1
    rank = 0
    for col in range(a.shape[1]):
        rows = np.nonzero(a[rank:, col])[0]
        if rows.size == 0:
            continue
        piv = rank + rows[0]
        a[[rank, piv]] = a[[piv, rank]]
        mask = a[:, col].astype(bool)
        mask[rank] = False
        a[mask] ^= a[rank]
        rank += 1
        if rank == a.shape[0]:
            break
    return rank

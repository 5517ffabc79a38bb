"""Pure-Python kernels.

Bitsets are plain Python ints (bit ``i`` is element ``i``). The compiled
module ``_kernels`` implements the same two routines over ``uint64`` words
and must make identical decisions, so witnesses agree across backends.
"""


def min_weight(basis):
    """Minimum Hamming weight over all nonzero combinations of ``basis``.

    Walks the combinations in Gray-code order so each step is one XOR.
    Returns ``(weight, mask)`` where bit ``j`` of ``mask`` selects basis row
    ``j``. Stops early at weight 1.
    """
    k = len(basis)
    word = 0
    mask = 0
    best = -1
    best_mask = 0
    for i in range(1, 1 << k):
        j = (i & -i).bit_length() - 1
        word ^= basis[j]
        mask ^= 1 << j
        w = word.bit_count()
        if best < 0 or w < best:
            best = w
            best_mask = mask
            if w == 1:
                break
    return best, best_mask


def _cover_count(P, adj, limit):
    # Greedy clique cover of P, scanning vertices in increasing order.
    # The count is capped at limit + 1 since only "count <= limit" matters.
    cands = []
    Q = P
    while Q:
        low = Q & -Q
        v = low.bit_length() - 1
        Q ^= low
        for c in range(len(cands)):
            if (cands[c] >> v) & 1:
                cands[c] &= adj[v]
                break
        else:
            if len(cands) == limit + 1:
                return limit + 1
            cands.append(adj[v] & P)
    return len(cands)


def max_independent_set(adj, nv):
    """Exact maximum stable set of the graph with neighbour bitsets ``adj``.

    Depth-first branch and bound: branch on the highest-degree candidate
    (lowest index on ties), include-branch first, prune when the current size
    plus a greedy clique cover of the candidates cannot beat the incumbent.
    Returns ``(alpha, witness_bitset)``.
    """
    best = 0
    best_set = 0
    stack = [((1 << nv) - 1, 0, 0)]
    while stack:
        P, S, s = stack.pop()
        if not P:
            if s > best:
                best, best_set = s, S
            continue
        limit = best - s
        if limit >= 0 and _cover_count(P, adj, limit) <= limit:
            continue
        bv = -1
        bd = -1
        Q = P
        while Q:
            low = Q & -Q
            v = low.bit_length() - 1
            Q ^= low
            d = (adj[v] & P).bit_count()
            if d > bd:
                bd, bv = d, v
        if bd == 0:
            total = s + P.bit_count()
            if total > best:
                best, best_set = total, S | P
            continue
        vb = 1 << bv
        stack.append((P & ~vb, S, s))
        stack.append((P & ~adj[bv] & ~vb, S | vb, s + 1))
    return best, best_set

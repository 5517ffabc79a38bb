"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import timeit

from graphcodes import BACKEND, _backend
from graphcodes.capacity import SimpleGraph, restricted_power


def mis_cases():
    c5 = SimpleGraph.cycle(5)
    for r, k in [(2, 2), (3, 1), (3, 2), (3, 3)]:
        yield f"MIS C5({r},{k})", restricted_power(c5, r, k).adjacency
    rng = random.Random(0)
    n = 60
    adj = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.2:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
    yield "MIS G(60, 0.2)", tuple(adj)


def weight_cases():
    rng = random.Random(1)
    for n, k in [(24, 12), (40, 18), (64, 20)]:
        yield f"min-weight n={n} k={k}", [rng.getrandbits(n) for _ in range(k)], n


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["python"] + (["cython"] if BACKEND == "cython" else [])
    print(f"{'case':<24}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    rows = []
    for label, adj in mis_cases():
        rows.append((label, [min(timeit.repeat(lambda: _backend.max_independent_set(adj, b), number=1,
                                               repeat=args.repeat)) for b in backends]))
    for label, basis, n in weight_cases():
        rows.append((label, [min(timeit.repeat(lambda: _backend.min_weight(basis, n, b), number=1,
                                               repeat=args.repeat)) for b in backends]))
    for label, times in rows:
        line = f"{label:<24}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[0] / times[1]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()

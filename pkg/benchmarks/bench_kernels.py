"""Time each kernel on its numba and numpy paths and check they agree.

    python3 benchmarks/bench_kernels.py [--n 65536] [--repeat 5]

The numba column excludes compilation (one warm-up call first).
"""
import argparse
import time

import numpy as np

from ruling_color import _kernels as K
from ruling_color.graph import random_regular


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def token_case(g, m, steps, rng):
    pos = np.empty((m, steps), dtype=np.int64)
    pos[:, 0] = rng.choice(g.n, m, replace=False)
    for tau in range(1, steps):
        cur = pos[:, tau - 1]
        deg = g.indptr[cur + 1] - g.indptr[cur]
        pos[:, tau] = g.indices[g.indptr[cur] + rng.integers(0, deg)]
    return pos, rng.permutation(m).astype(np.int64)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1 << 16)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba disabled; only the numpy column is meaningful")

    rng = np.random.default_rng(0)
    g = random_regular(args.n, 3, seed=0)
    blocked = np.zeros(g.n, dtype=np.bool_)
    src = np.array([0], dtype=np.int64)
    vals = rng.permutation(g.n).astype(np.int64)
    pos, rank = token_case(g, max(g.n // 16, 2), 64, rng)

    def tokens_numpy():
        m = pos.shape[0]
        alive, et, el = np.ones(m, bool), np.full(m, -1), np.full(m, -1)
        K.replay_tokens_numpy(pos, rank, g.n, alive, et, el, 0, pos.shape[1])
        return et

    def tokens_jit():
        m = pos.shape[0]
        alive, et, el = np.ones(m, bool), np.full(m, -1), np.full(m, -1)
        K._replay_tokens_jit(pos, rank, g.n, alive, et, el, 0, pos.shape[1])
        return et

    cases = {
        "bfs_dist": (lambda: K.bfs_dist_numpy(g.indptr, g.indices, src, -1, blocked),
                     lambda: K._bfs_dist_jit(g.indptr, g.indices, src, -1, blocked)),
        "flood_min(8)": (lambda: K.flood_min_numpy(g.indptr, g.indices, vals, 8),
                         lambda: K._flood_min_jit(g.indptr, g.indices, vals, 8)),
        "replay_tokens": (tokens_numpy, tokens_jit),
    }
    print(f"random cubic graph, n={g.n}; best of {args.repeat}")
    print(f"{'kernel':<16}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}  agree")
    for name, (f_np, f_jit) in cases.items():
        f_jit()  # compile
        t_np, a = best_of(f_np, args.repeat)
        t_jit, b = best_of(f_jit, args.repeat)
        print(f"{name:<16}{t_np * 1e3:>12.2f}{t_jit * 1e3:>12.2f}{t_np / t_jit:>10.1f}  {np.array_equal(a, b)}")


if __name__ == "__main__":
    main()

"""Hot loops over CSR adjacency arrays.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy version.
The numba path is used when numba imports and ``RULING_COLOR_NUMBA`` is not
set to ``0``. Both paths must return identical arrays; the test-suite checks
this on random inputs.
"""
from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("RULING_COLOR_NUMBA", "1").strip().lower()

try:
    if _FLAG in ("0", "false", "no", "off"):
        raise ImportError("numba disabled by RULING_COLOR_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag in a subprocess
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# ---------------------------------------------------------------- numpy path


def _frontier_neighbors(indptr: np.ndarray, indices: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=indices.dtype)
    offsets = np.repeat(starts - np.cumsum(counts) + counts, counts)
    return indices[offsets + np.arange(total)]


def bfs_dist_numpy(indptr, indices, sources, limit, blocked):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    frontier = np.unique(np.asarray(sources, dtype=np.int64))
    if frontier.size == 0:
        return dist
    dist[frontier] = 0
    depth = 0
    while frontier.size and (limit < 0 or depth < limit):
        nbrs = _frontier_neighbors(indptr, indices, frontier)
        nbrs = nbrs[(dist[nbrs] < 0) & ~blocked[nbrs]]
        frontier = np.unique(nbrs)
        depth += 1
        dist[frontier] = depth
    return dist


def replay_tokens_numpy(pos, rank, n, alive, elim_time, eliminator, start, stop):
    m = pos.shape[0]
    owner_of_rank = np.empty(m, dtype=np.int64)
    owner_of_rank[rank] = np.arange(m)
    best = np.full(n, -1, dtype=np.int64)
    for tau in range(start, min(stop, pos.shape[1])):
        idx = np.flatnonzero(alive)
        if idx.size <= 1:
            break
        where = pos[idx, tau]
        np.maximum.at(best, where, rank[idx])
        lost = best[where] != rank[idx]
        losers = idx[lost]
        elim_time[losers] = tau
        eliminator[losers] = owner_of_rank[best[where[lost]]]
        alive[losers] = False
        best[where] = -1


def flood_min_numpy(indptr, indices, values, rounds):
    vals = values.copy()
    n = indptr.shape[0] - 1
    deg = np.diff(indptr)
    has = deg > 0
    for _ in range(rounds):
        nb = vals[indices]
        reduced = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
        if nb.size:
            reduced[has] = np.minimum.reduceat(nb, indptr[:-1][has])
        new = np.minimum(vals, reduced)
        if np.array_equal(new, vals):
            break
        vals = new
    return vals


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def _bfs_dist_jit(indptr, indices, sources, limit, blocked):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        if limit >= 0 and du >= limit:
            continue
        for j in range(indptr[u], indptr[u + 1]):
            w = indices[j]
            if dist[w] < 0 and not blocked[w]:
                dist[w] = du + 1
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def _replay_tokens_jit(pos, rank, n, alive, elim_time, eliminator, start, stop):
    m, steps = pos.shape
    best = np.full(n, -1, dtype=np.int64)
    holder = np.full(n, -1, dtype=np.int64)
    n_alive = 0
    for i in range(m):
        if alive[i]:
            n_alive += 1
    for tau in range(start, min(stop, steps)):
        if n_alive <= 1:
            break
        for i in range(m):
            if alive[i]:
                v = pos[i, tau]
                if rank[i] > best[v]:
                    best[v] = rank[i]
                    holder[v] = i
        for i in range(m):
            if alive[i]:
                v = pos[i, tau]
                if holder[v] != i:
                    alive[i] = False
                    elim_time[i] = tau
                    eliminator[i] = holder[v]
                    n_alive -= 1
        for i in range(m):
            v = pos[i, tau]
            best[v] = -1
            holder[v] = -1


@njit(cache=True)
def _flood_min_jit(indptr, indices, values, rounds):
    n = indptr.shape[0] - 1
    vals = values.copy()
    new = values.copy()
    for _ in range(rounds):
        changed = False
        for u in range(n):
            best = vals[u]
            for j in range(indptr[u], indptr[u + 1]):
                x = vals[indices[j]]
                if x < best:
                    best = x
            new[u] = best
            if best != vals[u]:
                changed = True
        vals, new = new, vals
        if not changed:
            break
    return vals


# ---------------------------------------------------------------- dispatch


def bfs_dist(indptr: np.ndarray, indices: np.ndarray, sources, limit: int = -1,
             blocked: np.ndarray | None = None) -> np.ndarray:
    """Hop distances from ``sources``; ``-1`` marks unreached vertices.

    ``limit`` caps the search depth (negative means unbounded). Vertices with
    ``blocked[v]`` set are never entered, though a blocked source still counts.
    """
    n = indptr.shape[0] - 1
    src = np.asarray(sources, dtype=np.int64).ravel()
    if blocked is None:
        blocked = np.zeros(n, dtype=np.bool_)
    if HAVE_NUMBA:
        return _bfs_dist_jit(indptr, indices, src, int(limit), blocked)
    return bfs_dist_numpy(indptr, indices, src, int(limit), blocked)


def replay_tokens(pos: np.ndarray, rank: np.ndarray, n: int, alive: np.ndarray, elim_time: np.ndarray,
                  eliminator: np.ndarray, start: int, stop: int) -> None:
    """Resolve token collisions for time columns ``start..stop-1`` in place.

    ``pos[i, tau]`` is the vertex of token ``i`` at time ``tau``; ``rank`` is a
    permutation of ``0..m-1`` and the highest rank at a vertex survives. Losers
    get ``alive[i] = False``, their elimination time and the winner's index.
    """
    if pos.shape[0] == 0:
        return
    if HAVE_NUMBA:
        _replay_tokens_jit(pos, rank, int(n), alive, elim_time, eliminator, int(start), int(stop))
    else:
        replay_tokens_numpy(pos, rank, int(n), alive, elim_time, eliminator, int(start), int(stop))


def simulate_tokens(pos: np.ndarray, rank: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Replay whole scripts; returns elimination times (-1 = survived) and eliminators."""
    pos = np.ascontiguousarray(pos, dtype=np.int64)
    rank = np.ascontiguousarray(rank, dtype=np.int64)
    m = pos.shape[0]
    alive = np.ones(m, dtype=np.bool_)
    elim_time = np.full(m, -1, dtype=np.int64)
    eliminator = np.full(m, -1, dtype=np.int64)
    replay_tokens(pos, rank, n, alive, elim_time, eliminator, 0, pos.shape[1] if m else 0)
    return elim_time, eliminator


def flood_min(indptr: np.ndarray, indices: np.ndarray, values: np.ndarray, rounds: int) -> np.ndarray:
    """Minimum of ``values`` over each vertex's ``rounds``-hop ball."""
    values = np.ascontiguousarray(values, dtype=np.int64)
    if HAVE_NUMBA:
        return _flood_min_jit(indptr, indices, values, int(rounds))
    return flood_min_numpy(indptr, indices, values, int(rounds))

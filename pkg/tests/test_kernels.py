import json
import os
import subprocess
import sys

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ruling_color import _kernels as K
from ruling_color.graph import random_regular

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba path disabled")


@st.composite
def csr_graphs(draw, max_n=30):
    n = draw(st.integers(1, max_n))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 3 * n))) if pairs else []
    h = nx.Graph()
    h.add_nodes_from(range(n))
    h.add_edges_from(edges)
    adj = [sorted(h.adj[v]) for v in range(n)]
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    indices = np.array([w for a in adj for w in a], dtype=np.int64)
    return h, indptr, indices


def naive_tokens(pos, rank):
    """Step through time; at each vertex all but the highest-ranked live token die."""
    m, steps = pos.shape
    alive = [True] * m
    et, el = [-1] * m, [-1] * m
    for tau in range(steps):
        if sum(alive) <= 1:
            break
        at: dict[int, list[int]] = {}
        for i in range(m):
            if alive[i]:
                at.setdefault(int(pos[i, tau]), []).append(i)
        for group in at.values():
            win = max(group, key=lambda i: rank[i])
            for i in group:
                if i != win:
                    alive[i], et[i], el[i] = False, tau, win
    return np.array(et), np.array(el)


@given(csr_graphs(), st.data())
def test_bfs_matches_networkx_and_paths_agree(graph, data):
    h, indptr, indices = graph
    n = h.number_of_nodes()
    src = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=3))
    limit = data.draw(st.integers(-1, 5))
    blocked = np.array(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)))
    got = K.bfs_dist_numpy(indptr, indices, np.array(src), limit, blocked)
    keep = [v for v in range(n) if not blocked[v] or v in src]
    ref = nx.multi_source_dijkstra_path_length(h.subgraph(keep), set(src),
                                               cutoff=None if limit < 0 else limit)
    assert {v: int(d) for v, d in enumerate(got) if d >= 0} == ref
    if K.HAVE_NUMBA:
        assert np.array_equal(got, K._bfs_dist_jit(indptr, indices, np.array(src, dtype=np.int64), limit, blocked))


@given(csr_graphs(), st.integers(0, 6), st.data())
def test_flood_min_is_ball_minimum(graph, rounds, data):
    h, indptr, indices = graph
    n = h.number_of_nodes()
    vals = np.array(data.draw(st.permutations(range(n))), dtype=np.int64)
    got = K.flood_min_numpy(indptr, indices, vals, rounds)
    for v in range(n):
        ball = nx.single_source_shortest_path_length(h, v, cutoff=rounds)
        assert got[v] == min(vals[u] for u in ball)
    if K.HAVE_NUMBA:
        assert np.array_equal(got, K._flood_min_jit(indptr, indices, vals, rounds))


@given(st.integers(1, 12), st.integers(1, 8), st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_token_replay_matches_naive(m, steps, n, seed):
    rng = np.random.default_rng(seed)
    pos = rng.integers(0, n, size=(m, steps)).astype(np.int64)
    rank = rng.permutation(m).astype(np.int64)
    ref = naive_tokens(pos, rank)
    for fn in ([K.replay_tokens_numpy] + ([K._replay_tokens_jit] if K.HAVE_NUMBA else [])):
        alive = np.ones(m, dtype=np.bool_)
        et, el = np.full(m, -1, dtype=np.int64), np.full(m, -1, dtype=np.int64)
        fn(pos, rank, n, alive, et, el, 0, steps)
        assert et.tolist() == ref[0].tolist() and el.tolist() == ref[1].tolist()


@needs_numba
def test_paths_agree_on_cubic_graph():
    g = random_regular(2048, 3, seed=4)
    src = np.array([0, 77], dtype=np.int64)
    blocked = np.zeros(g.n, dtype=np.bool_)
    assert np.array_equal(K.bfs_dist_numpy(g.indptr, g.indices, src, -1, blocked),
                          K._bfs_dist_jit(g.indptr, g.indices, src, -1, blocked))
    vals = np.random.default_rng(1).permutation(g.n).astype(np.int64)
    assert np.array_equal(K.flood_min_numpy(g.indptr, g.indices, vals, 7),
                          K._flood_min_jit(g.indptr, g.indices, vals, 7))


_PROBE = """
import json
from ruling_color import _kernels
from ruling_color.coloring import delta_color_deterministic
from ruling_color.graph import random_regular
from ruling_color.runtime import RoundLedger
led = RoundLedger()
c = delta_color_deterministic(random_regular(256, 3, seed=2), led)
print(json.dumps({"numba": _kernels.HAVE_NUMBA, "col": c.col.tolist(), "rounds": led.as_dicts()}))
"""


def _probe(flag):
    env = dict(os.environ, RULING_COLOR_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", _PROBE], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_env_flag_selects_numpy_path_with_identical_output():
    off = _probe("0")
    assert off["numba"] is False
    on = _probe("1")
    assert on["col"] == off["col"] and on["rounds"] == off["rounds"]

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphs import complete, make, path, petersen
from ruling_color.graph import random_regular, torus_grid
from ruling_color.runtime import RoundLedger, VirtualGraph, log_star
from ruling_color.symmetry import (LINIAL_C0, LINIAL_C1, VertexColoring, check_ruling_set, linial_coloring,
                                   linial_parameters, mis_from_coloring, randomized_ruling_set,
                                   ruling_set_from_coloring, uniform)


def proper(g, color):
    e = g.edge_array()
    return bool(np.all(color[e[:, 0]] != color[e[:, 1]]))


def check_linial(g, led=None):
    led = led if led is not None else RoundLedger()
    c = linial_coloring(g, led)
    delta = int(g.degree.max()) if g.n else 0
    assert proper(g, c.color)
    assert c.color.min(initial=1) >= 1 and c.color.max(initial=1) <= c.palette_size
    assert c.palette_size <= LINIAL_C0 * max(delta, 1) ** 2
    m = int(g.ids.max()) + 1 if g.n else 1
    assert led.total() <= LINIAL_C1 * max(log_star(m), 1)
    return c


@st.composite
def id_graphs(draw, max_n=14):
    n = draw(st.integers(1, max_n))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    ids = draw(st.lists(st.integers(0, 2**40), min_size=n, max_size=n, unique=True))
    return make(n, edges, ids)


# ------------------------------------------------------------------ Linial

def test_linial_single_vertex():
    c = check_linial(make(1, []))
    assert c.color.tolist() == [1]


def test_linial_p3_with_ids():
    g = make(3, [(0, 1), (1, 2)], ids=[5, 9, 2])
    c = check_linial(g)
    assert c.palette_size <= LINIAL_C0 * 4


def test_linial_cubic_1024():
    g = random_regular(1024, 3, seed=0)
    c = check_linial(g)
    assert c.palette_size <= 9 * LINIAL_C0


def test_linial_large_ids_torus():
    g = torus_grid(8, 8)
    g = make(g.n, g.edge_array().tolist(), ids=[(v * 7919 + 13) << 30 for v in range(g.n)])
    check_linial(g)


@given(id_graphs())
def test_linial_always_proper_and_bounded(g):
    check_linial(g)


def test_linial_parameters_reduce_palette():
    # one reduction step must shrink a large ID space
    q, k = linial_parameters(10**6, 3)
    assert q * q < 10**6
    assert linial_parameters(4, 3) is None


def test_linial_on_virtual_graph():
    host = path(6)
    vg = VirtualGraph((0, 1, 2), [(0, 1), (1, 2)], 4, np.array([0, 2, 5]), host)
    led = RoundLedger()
    c = linial_coloring(vg, led)
    assert proper(vg.comm, c.color)
    e = led.entries[-1]
    assert e.mode == "virtual" and e.charged_rounds == 4 * e.native_rounds


# ------------------------------------------------------------ ruling sets

def _ruling(g, c):
    col = linial_coloring(g, None)
    led = RoundLedger()
    rs = ruling_set_from_coloring(g, col, c, led)
    ok, msg = check_ruling_set(g, rs.members, 2, rs.beta)
    assert ok, msg
    return rs, col, led


def test_ruling_edgeless_selects_all():
    g = make(5, [])
    for c in (1, 3):
        rs = ruling_set_from_coloring(g, VertexColoring(1, np.ones(5, dtype=np.int64)), c, None)
        assert rs.members.tolist() == [0, 1, 2, 3, 4]


def test_ruling_k4_c2():
    g = complete(4)
    col = VertexColoring(4, np.array([1, 2, 3, 4]))
    rs = ruling_set_from_coloring(g, col, 2, RoundLedger())
    assert rs.members.size == 1
    assert check_ruling_set(g, rs.members, 2, 2)[0]


def test_ruling_rounds_and_beta():
    g = random_regular(512, 3, seed=1)
    for c in (1, 2, 3, 5):
        rs, col, led = _ruling(g, c)
        b = math.ceil(col.palette_size ** (1 / c) - 1e-9)
        assert rs.beta == c
        assert led.total() <= c * b


def test_ruling_log_d():
    g = random_regular(512, 3, seed=2)
    col = linial_coloring(g, None)
    c = max(1, math.ceil(math.log2(col.palette_size)))
    rs = ruling_set_from_coloring(g, col, c, None)
    assert check_ruling_set(g, rs.members, 2, c)[0]


def test_ruling_rejects_c0():
    with pytest.raises(ValueError):
        ruling_set_from_coloring(path(2), VertexColoring(2, np.array([1, 2])), 0, None)


@given(id_graphs(), st.integers(1, 4))
def test_ruling_property(g, c):
    _ruling(g, c)


def test_check_ruling_set_reports_violations():
    g = path(5)
    assert not check_ruling_set(g, np.array([0, 1]), 2, 4)[0]
    ok, msg = check_ruling_set(g, np.array([0]), 2, 3)
    assert not ok and "farther" in msg
    assert check_ruling_set(g, np.array([0, 4]), 2, 2)[0]


# -------------------------------------------------------------------- MIS

def _is_mis(g, members):
    s = np.zeros(g.n, dtype=bool)
    s[members] = True
    e = g.edge_array()
    if np.any(s[e[:, 0]] & s[e[:, 1]]):
        return False
    return all(s[v] or any(s[u] for u in g.adj[v]) for v in range(g.n))


def test_mis_examples():
    assert mis_from_coloring(make(4, []), VertexColoring(1, np.ones(4, dtype=np.int64)), None).tolist() == [0, 1, 2, 3]
    k = complete(6)
    assert mis_from_coloring(k, VertexColoring(6, np.arange(1, 7)), None).size == 1
    p4 = path(4)
    led = RoundLedger()
    mis = mis_from_coloring(p4, VertexColoring(2, np.array([1, 2, 1, 2])), led)
    assert mis.size == 2 and _is_mis(p4, mis)
    assert led.total() <= 2


@given(id_graphs())
def test_mis_property(g):
    col = linial_coloring(g, None)
    led = RoundLedger()
    mis = mis_from_coloring(g, col, led)
    assert _is_mis(g, mis)
    assert led.total() <= col.palette_size


# ------------------------------------------------------------- randomized

def test_uniform_is_keyed_and_in_range():
    ids = np.arange(100)
    a = uniform(1, "x", ids)
    assert np.all((a >= 0) & (a < 1))
    assert np.array_equal(a, uniform(1, "x", ids))
    assert not np.array_equal(a, uniform(2, "x", ids))
    assert not np.array_equal(a, uniform(1, "y", ids))
    assert not np.array_equal(a, uniform(1, "x", ids, counter=1))


def test_randomized_ruling_edgeless():
    rs = randomized_ruling_set(make(6, []), 0, None)
    assert rs.members.tolist() == list(range(6))


def test_randomized_ruling_deterministic_per_seed():
    g = petersen()
    a = randomized_ruling_set(g, 7, RoundLedger())
    b = randomized_ruling_set(g, 7, RoundLedger())
    assert a.members.tolist() == b.members.tolist()


def test_randomized_ruling_cubic_4096():
    n = 4096
    g = random_regular(n, 3, seed=3)
    led = RoundLedger()
    rs = randomized_ruling_set(g, 11, led)
    loglog = math.ceil(math.log2(math.log2(n)))
    assert rs.beta == loglog + 1
    assert rs.beta <= 4 * loglog + loglog
    ok, msg = check_ruling_set(g, rs.members, 2, rs.beta)
    assert ok, msg


@given(id_graphs(), st.integers(0, 2**31))
def test_randomized_ruling_property(g, seed):
    rs = randomized_ruling_set(g, seed, None)
    ok, msg = check_ruling_set(g, rs.members, 2, rs.beta)
    assert ok, msg

import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphs import complete, cycle, make, path, petersen
from ruling_color.coloring import BrooksViolation, ColoringFailure, PartialColoring, layer_by_distance
from ruling_color.graph import random_regular, torus_grid
from ruling_color.randomized import (RandConfig, Unreachable, delta_color_randomized, derive_seed, radius_parameter,
                                     t_node_sampling, uncolored_distance_layers)
from ruling_color.runtime import RoundLedger
from ruling_color.verify import verify_proper_coloring

CUBIC = random_regular(1024, 3, seed=21)


def test_radius_parameter():
    assert radius_parameter(2**16, 3) == 131
    assert radius_parameter(4096, 3) == 126


def test_config_resolution():
    assert RandConfig().resolved() == RandConfig()
    full = RandConfig(paper_constants=True).resolved()
    assert (full.b, full.p_exp) == (34, 34.0)
    assert 3.0 ** -full.p_exp == 3.0 ** -34


def test_derive_seed():
    assert derive_seed(17, 0) == 17
    assert derive_seed(17, 1) == derive_seed(17, 1) != derive_seed(17, 2)
    assert derive_seed(17, 1) >= 0


# --------------------------------------------------------------- T-nodes

def test_sampling_p_zero():
    tn = t_node_sampling(CUBIC, np.arange(CUBIC.n), 4, 0.0, seed=1)
    assert tn.t_nodes.size == 0 and tn.sampled == 0


def test_sampling_everyone_selected_unselects_all():
    tn = t_node_sampling(CUBIC, np.arange(CUBIC.n), 3, 1.0, seed=1)
    assert tn.sampled == CUBIC.n and tn.t_nodes.size == 0


def test_sampling_lone_selection_survives():
    g = torus_grid(8, 8)
    tn = t_node_sampling(g, [0], 30, 1.0, seed=0)
    assert tn.t_nodes.tolist() == [0]


def test_sampling_validation():
    with pytest.raises(ValueError):
        t_node_sampling(CUBIC, [0], 0, 0.5, 0)
    with pytest.raises(ValueError):
        t_node_sampling(CUBIC, [0], 2, 1.5, 0)


def test_sampling_renounces_without_pair():
    # every neighbour pair of the hub is adjacent (a wheel-like K4), so it cannot mark
    g = make(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)])
    tn = t_node_sampling(g, [0], 1, 1.0, seed=0)
    assert tn.t_nodes.size == 0 and tn.renounced == [0]


def check_outcome(g, tn, coloring):
    t = tn.t_nodes.tolist()
    if t:
        d = [g.bfs([v]) for v in t]
        for i in range(len(t)):
            for j in range(i + 1, len(t)):
                assert d[i][t[j]] > tn.b
    for v, (a, c) in tn.marked.items():
        assert a in g.adj[v] and c in g.adj[v] and not g.has_edge(a, c)
        assert coloring.col[a] == coloring.col[c] == 1
    assert coloring.is_proper(g)


@given(st.integers(1, 6), st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_sampling_invariants(b, p, seed):
    c = PartialColoring.empty(CUBIC)
    tn = t_node_sampling(CUBIC, np.arange(CUBIC.n), b, p, seed, RoundLedger(), c)
    check_outcome(CUBIC, tn, c)
    assert int((c.col == 1).sum()) == 2 * tn.t_nodes.size


def test_sampling_is_seeded():
    a = t_node_sampling(CUBIC, np.arange(CUBIC.n), 2, 0.05, seed=3)
    b = t_node_sampling(CUBIC, np.arange(CUBIC.n), 2, 0.05, seed=3)
    assert a.t_nodes.tolist() == b.t_nodes.tolist() and a.marked == b.marked


def test_sampling_ledger_entries():
    led = RoundLedger()
    t_node_sampling(CUBIC, np.arange(CUBIC.n), 4, 0.01, 0, led)
    assert [(e.phase, e.native_rounds) for e in led.entries] == [("t_nodes/conflicts", 4), ("t_nodes/mark", 2)]


# ------------------------------------------------------------------ layers

def test_uncolored_layers_plain():
    g = torus_grid(6, 6)
    c = PartialColoring.empty(g)
    assert np.array_equal(uncolored_distance_layers(g, [0], c).layer, layer_by_distance(g, [0]).layer)


def test_uncolored_layers_flag_cut_off_vertex():
    g = path(5)
    c = PartialColoring(np.array([0, 0, 1, 0, 0]), 3)
    with pytest.raises(Unreachable) as err:
        uncolored_distance_layers(g, [0], c)
    assert err.value.vertex_id == 3
    assert "vertex 3" in str(err.value)
    assert "no T-node" in str(Unreachable(None))


def test_uncolored_layers_torus_with_t_nodes():
    g = torus_grid(16, 16)
    c = PartialColoring.empty(g)
    tn = t_node_sampling(g, np.arange(g.n), 3, 0.02, 5, None, c)
    assert tn.t_nodes.size
    part = uncolored_distance_layers(g, tn.t_nodes, c)
    dist = g.bfs(tn.t_nodes, blocked=c.col > 0)
    free = c.col == 0
    assert np.array_equal(part.layer[free], dist[free])
    assert part.layer[free].max() == part.h


# ---------------------------------------------------------------- pipeline

def test_desk_defaults_take_deterministic_shape():
    c = delta_color_randomized(CUBIC, seed=0)
    assert verify_proper_coloring(CUBIC, c.col, 3).summary
    assert c.info["participants"] == 0 and c.info["t_nodes"] == 0
    assert c.info["d"] == radius_parameter(CUBIC.n, 3)


@pytest.mark.parametrize("d", [1, 2])
def test_small_d_produces_t_nodes(d):
    g = random_regular(4096, 3, seed=0)
    c = delta_color_randomized(g, seed=4, config=RandConfig(d=d, max_retries=6))
    assert verify_proper_coloring(g, c.col, 3).summary
    assert c.info["t_nodes"] > 0 and c.info["participants"] > 0


def test_same_seed_same_everything():
    g = torus_grid(12, 12)
    cfg = RandConfig(d=1, max_retries=8)
    la, lb = RoundLedger(), RoundLedger()
    a = delta_color_randomized(g, 9, cfg, la)
    b = delta_color_randomized(g, 9, cfg, lb)
    assert a.col.tolist() == b.col.tolist() and a.info == b.info
    assert la.as_dicts() == lb.as_dicts()


def test_retry_prefixes_and_info():
    g = torus_grid(8, 8)
    cfg = RandConfig(d=1, max_retries=10)
    for seed in range(40):
        led = RoundLedger()
        try:
            c = delta_color_randomized(g, seed, cfg, led)
        except ColoringFailure:
            continue
        if c.info["attempts"] > 1:
            break
    else:
        pytest.fail("no seed needed a retry")
    assert len(c.info["failures"]) == c.info["attempts"] - 1
    assert any(e.phase.startswith("attempt1/") for e in led.entries)
    assert verify_proper_coloring(g, c.col, 4).summary


def test_retries_exhausted():
    # girth 5 and no LDCC of <= 5 vertices: no family at d=1, and p ~ 0 leaves no T-nodes
    with pytest.raises(ColoringFailure, match="retries exhausted after 3 attempts"):
        delta_color_randomized(petersen(), 0, RandConfig(d=1, p_exp=80.0, max_retries=2))


@pytest.mark.parametrize("g", [complete(4), cycle(5)], ids=["K4", "C5"])
def test_brooks_rejected(g):
    with pytest.raises(BrooksViolation):
        delta_color_randomized(g, 0)


def test_large_constants_complete():
    g = random_regular(4096, 3, seed=1)
    c = delta_color_randomized(g, 2, RandConfig(paper_constants=True))
    assert verify_proper_coloring(g, c.col, 3).summary
    assert c.info["t_nodes"] == 0 and c.info["config"]["b"] == 34


@given(st.integers(0, 2**31), st.integers(1, 3))
def test_randomized_always_proper_when_it_returns(seed, d):
    g = torus_grid(10, 10)
    try:
        c = delta_color_randomized(g, seed, RandConfig(d=d, max_retries=2))
    except ColoringFailure:
        return
    assert verify_proper_coloring(g, c.col, 4).summary

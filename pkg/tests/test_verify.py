from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphs import complete, cycle, diamond, k23, make, path, petersen, random_family, whole
from ruling_color.graph import Subgraph, random_regular
from ruling_color.ruling import Orchid, ruling_subgraphs
from ruling_color.runtime import RoundLedger
from ruling_color.verify import (VerificationReport, brute_force_list_choosable, exhaustive_delta_colorable,
                                 verify_brooks_preconditions, verify_degree_bounds, verify_proper_coloring,
                                 verify_ruling_family)


def naive_colorable(g, k):
    e = g.edge_array().tolist()
    return any(all(c[a] != c[b] for a, b in e) for c in product(range(k), repeat=g.n))


def naive_choosable(g, palette):
    """Every list assignment, no symmetry reduction, every coloring tried."""
    e = g.edge_array().tolist()
    options = [list(combinations(range(palette), int(g.degree[v]))) for v in range(g.n)]
    for lists in product(*options):
        if not any(all(c[a] != c[b] for a, b in e) for c in product(*lists)):
            return False
    return True


@st.composite
def tiny_graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return make(n, edges)


# --------------------------------------------------------------- coloring

def test_proper_coloring_examples():
    k3 = complete(3)
    assert verify_proper_coloring(k3, [1, 2, 3], 3).summary
    rep = verify_proper_coloring(k3, [1, 1, 3], 3)
    assert not rep.summary and "edge 0-1" in rep.failures()[0]
    assert not verify_proper_coloring(k3, [1, 2, 4], 3).summary
    assert "uncolored" in verify_proper_coloring(k3, [1, 2, 0], 3).failures()[0]
    assert not verify_proper_coloring(k3, [1, 2], 3).summary


def test_failing_check_needs_witness():
    with pytest.raises(ValueError):
        VerificationReport().add("x", False)


def test_brooks_examples():
    assert not verify_brooks_preconditions(cycle(5)).summary
    rep = verify_brooks_preconditions(complete(4))
    assert not rep.summary and "K_4" in rep.failures()[0]
    assert verify_brooks_preconditions(petersen()).summary
    two = make(8, [(a, b) for a, b in combinations(range(4), 2)] + [(4, 5), (5, 6), (6, 7), (7, 4), (4, 6)])
    assert not verify_brooks_preconditions(two).summary


# ---------------------------------------------------------------- oracles

def test_exhaustive_examples():
    assert not exhaustive_delta_colorable(complete(4))
    assert exhaustive_delta_colorable(diamond())
    assert exhaustive_delta_colorable(petersen())
    with pytest.raises(ValueError, match="cap"):
        exhaustive_delta_colorable(random_regular(14, 3, seed=0))


@given(tiny_graphs(7))
def test_exhaustive_matches_naive(g):
    assert exhaustive_delta_colorable(g) == naive_colorable(g, g.delta)


def test_list_choosable_examples():
    assert brute_force_list_choosable(whole(cycle(4)))
    assert not brute_force_list_choosable(whole(cycle(5)))
    assert not brute_force_list_choosable(whole(complete(4)))
    assert brute_force_list_choosable(whole(k23()))
    assert brute_force_list_choosable(whole(diamond()))
    with pytest.raises(ValueError):
        brute_force_list_choosable(whole(cycle(7)))


@settings(max_examples=40)
@given(tiny_graphs(4), st.integers(3, 4))
def test_list_choosable_matches_naive(g, palette):
    if int(g.degree.max(initial=0)) > palette:
        return
    assert brute_force_list_choosable(g, palette) == naive_choosable(g, palette)


# ---------------------------------------------------------- ruling family

def test_ruling_family_examples():
    g = path(12)
    fam = [Orchid.build(Subgraph(g, (v,)), v, (v,), 1) for v in (0, 4, 8)]
    rep, radius = verify_ruling_family(g, fam, fam, 1, coverage_bound=0)
    assert rep.summary and radius == 0
    close = [Orchid.build(Subgraph(g, (v,)), v, (v,), 1) for v in (0, 1)]
    rep, _ = verify_ruling_family(g, close, close, 1)
    assert not rep.summary
    assert any("member" in f for f in rep.failures())
    rep, _ = verify_ruling_family(g, fam, [], 1)
    assert not rep.summary


def test_ruling_family_after_run():
    g = random_regular(512, 3, seed=2)
    fam = random_family(g, 80, 8, 4, 1, np.random.default_rng(0))
    res = ruling_subgraphs(fam, 8, 4, 1, RoundLedger())
    rep, radius = verify_ruling_family(g, fam, res.family, 1, res.coverage_bound)
    assert rep.summary, rep.failures()
    assert radius == res.coverage_radius


def test_degree_bounds_report():
    ok = [{"stage": "s", "checks": [{"name": "a", "measured": 3, "bound": 3}]}]
    bad = [{"stage": "s", "checks": [{"name": "a", "measured": 4, "bound": 3}]}]
    assert verify_degree_bounds(ok).summary
    rep = verify_degree_bounds(bad)
    assert not rep.summary and "measured 4 > bound 3" in rep.failures()[0]

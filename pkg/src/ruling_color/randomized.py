"""Randomized Δ-coloring with T-nodes.

Vertices far from every small NLΔEC take part in T-node sampling. A T-node
colors two non-adjacent neighbours with color 1 and so keeps a free color
for itself whatever happens around it. Everything else is layered by its
uncolored distance to a T-node or to a surviving NLΔEC, colored from the
outside in, and the T-nodes and NLΔECs go last.

All randomness comes from :func:`uniform`, a hash of (seed, phase, counter,
vertex ID), so a run is a pure function of its seed.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._kernels import flood_min
from .coloring import (BrooksViolation, ColoringFailure, LayeredPartition, PartialColoring, color_family,
                       color_layered, layer_by_distance)
from .graph import Graph
from .ruling import deterministic_ruling, randomized_ruling, ruling_subgraphs
from .runtime import RoundLedger, SuperstepProgram, charge_ball, run_superstep
from .structures import NLdec, NldecSearch, natural_orchid
from .symmetry import uniform
from .verify import verify_brooks_preconditions, verify_proper_coloring


@dataclass(frozen=True)
class RandConfig:
    """Knobs of the randomized pipeline.

    Desk defaults sample with p = Δ^-4 at conflict distance 4; the asymptotic
    constants (34, Δ^-34) are available via ``paper_constants``.
    """

    b: int = 4
    p_exp: float = 4.0
    d: int | None = None
    max_retries: int = 3
    paper_constants: bool = False

    def resolved(self) -> "RandConfig":
        if self.paper_constants:
            return RandConfig(34, 34.0, self.d, self.max_retries, True)
        return self

    def as_dict(self) -> dict:
        return asdict(self)


def radius_parameter(n: int, delta: int) -> int:
    """⌈20·log_Δ(log₂ n) + 80⌉."""
    loglog = math.log2(max(n, 2))
    return math.ceil(20 * math.log(max(loglog, 1.0), delta) + 80)


@dataclass
class TNodeOutcome:
    t_nodes: np.ndarray
    marked: dict[int, tuple[int, int]]
    b: int
    p_select: float
    sampled: int = 0
    renounced: list[int] = field(default_factory=list)


class _ConflictFlood(SuperstepProgram):
    """b rounds of flooding the smallest and largest selected ID seen so far."""

    def __init__(self, selected: np.ndarray, b: int):
        self.selected = selected
        self.b = b

    def init(self, graph):
        big = np.iinfo(np.int64).max
        lo = np.where(self.selected, graph.ids, big)
        hi = np.where(self.selected, -graph.ids, big)
        return {"lo": lo, "hi": hi}

    def step(self, graph, state, rnd):
        return {"lo": flood_min(graph.indptr, graph.indices, state["lo"], 1),
                "hi": flood_min(graph.indptr, graph.indices, state["hi"], 1)}

    def halted(self, graph, state, rnd):
        return rnd >= self.b


def t_node_sampling(g: Graph, participants, b: int, p_select: float, seed: int,
                    ledger: RoundLedger | None = None, coloring: PartialColoring | None = None,
                    phase: str = "t_nodes") -> TNodeOutcome:
    """Sample T-nodes among ``participants``; marked neighbour pairs get color 1 in ``coloring``."""
    if b < 1:
        raise ValueError("conflict distance b must be at least 1")
    if not 0 <= p_select <= 1:
        raise ValueError("selection probability must lie in [0, 1]")
    part = np.zeros(g.n, dtype=bool)
    part[np.asarray(participants, dtype=np.int64)] = True
    selected = part & (uniform(seed, f"{phase}/select", g.ids) < p_select)
    sampled = int(selected.sum())
    state = run_superstep(g, _ConflictFlood(selected, b), ledger, f"{phase}/conflicts")
    alone = selected & (state["lo"] == g.ids) & (-state["hi"] == g.ids)

    col = coloring.col if coloring is not None else np.zeros(g.n, dtype=np.int64)
    marked: dict[int, tuple[int, int]] = {}
    renounced: list[int] = []
    taken = np.zeros(g.n, dtype=bool)
    pick = uniform(seed, f"{phase}/pair", g.ids)
    for v in np.flatnonzero(alone).tolist():
        nb = sorted(g.adj[v])
        pairs = [(a, c) for i, a in enumerate(nb) for c in nb[i + 1:] if not g.has_edge(a, c)]
        # keep marks of different T-nodes apart; only bites when b < 3
        pairs = [(a, c) for a, c in pairs
                 if not (taken[a] or taken[c] or any(taken[w] for w in g.adj[a] + g.adj[c]))]
        if not pairs:
            renounced.append(int(g.ids[v]))
            continue
        a, c = pairs[min(int(pick[v] * len(pairs)), len(pairs) - 1)]
        marked[v] = (a, c)
        taken[[a, c]] = True
        col[[a, c]] = 1
    if ledger is not None:
        ledger.record(f"{phase}/mark", "superstep", 2)
    t_nodes = np.array(sorted(marked), dtype=np.int64)
    return TNodeOutcome(t_nodes, marked, b, p_select, sampled, renounced)


class Unreachable(RuntimeError):
    """Some uncolored vertex cannot reach S; ``vertex_id`` is None when S itself is empty."""

    def __init__(self, vertex_id: int | None):
        msg = ("no T-node and no surviving structure to layer from" if vertex_id is None
               else f"vertex {vertex_id} has no uncolored path to a T-node or a surviving structure")
        super().__init__(msg)
        self.vertex_id = vertex_id


def uncolored_distance_layers(g: Graph, sources, coloring: PartialColoring, ledger: RoundLedger | None = None,
                              phase: str = "uncolored_layers") -> LayeredPartition:
    """BFS from ``sources`` through uncolored vertices; raises :class:`Unreachable`."""
    uncolored = coloring.col == 0
    try:
        return layer_by_distance(g, sources, ledger, phase, allowed=uncolored)
    except ValueError:
        src = np.asarray(sorted(sources), dtype=np.int64)
        allowed = uncolored.copy()
        allowed[src] = True
        dist = g.bfs(src, blocked=~allowed) if src.size else np.full(g.n, -1)
        bad = np.flatnonzero(allowed & (dist < 0))
        raise Unreachable(int(g.ids[bad[0]])) from None


def derive_seed(seed: int, attempt: int) -> int:
    if attempt == 0:
        return seed
    h = hashlib.blake2b(f"{seed}/{attempt}".encode(), digest_size=8).digest()
    return int.from_bytes(h, "little") >> 1


def delta_color_randomized(g: Graph, seed: int = 0, config: RandConfig | None = None,
                           ledger: RoundLedger | None = None) -> PartialColoring:
    """Proper Δ-coloring; success is probabilistic, so failed attempts retry with derived seeds."""
    config = (config or RandConfig()).resolved()
    report = verify_brooks_preconditions(g)
    if not report.summary:
        raise BrooksViolation(f"Brooks precondition violated: {report.failures()[0]}")
    ledger = RoundLedger() if ledger is None else ledger
    failures = []
    for attempt in range(config.max_retries + 1):
        s = derive_seed(seed, attempt)
        try:
            coloring = _attempt(g, s, config, ledger, f"attempt{attempt}" if attempt else "")
        except Unreachable as exc:
            failures.append(str(exc))
            continue
        coloring.info.update({"seed": seed, "attempts": attempt + 1, "failures": failures,
                              "config": config.as_dict()})
        return coloring
    raise ColoringFailure(f"retries exhausted after {config.max_retries + 1} attempts: {failures[-1]}")


def _attempt(g: Graph, seed: int, config: RandConfig, ledger: RoundLedger, tag: str) -> PartialColoring:
    pre = f"{tag}/" if tag else ""
    delta = g.delta
    d = config.d if config.d is not None else radius_parameter(g.n, delta)
    size_cap = 5 * d
    coloring = PartialColoring.empty(g)

    radius = -(-size_cap // 2)
    charge_ball(ledger, f"{pre}nldec_search", radius)
    picks = NldecSearch(g, radius).select()
    uniq = {c.sub.vertices: c for c in picks.values() if c is not None and len(c.sub) <= size_cap}
    family = sorted(uniq.values(), key=NLdec.key)

    chosen: list[NLdec] = []
    coverage = 0
    if family:
        k = max(len(c.sub) for c in family)
        orchids = [natural_orchid(c, 1, 4) for c in family]
        result = ruling_subgraphs(orchids, k, 4, 1, ledger, deterministic_ruling, f"{pre}ruling",
                                  orchid_ruling=randomized_ruling(seed))
        chosen = [family[i] for i in result.selected]
        coverage = result.coverage_radius
        h_vertices = sorted({v for c in family for v in c.sub.vertices})
        far = g.bfs(h_vertices)
        participants = np.flatnonzero((far < 0) | (far >= size_cap))
        charge_ball(ledger, f"{pre}participation", size_cap)
    else:
        participants = np.arange(g.n)

    p_select = float(delta) ** (-config.p_exp)
    tn = t_node_sampling(g, participants, config.b, p_select, seed, ledger, coloring, f"{pre}t_nodes")
    core = sorted({v for c in chosen for v in c.sub.vertices})
    sources = sorted(set(core) | set(tn.t_nodes.tolist()))
    if not sources:
        raise Unreachable(None)
    part = uncolored_distance_layers(g, sources, coloring, ledger, f"{pre}uncolored_layers")
    color_layered(g, part, coloring, ledger=ledger, phase=f"{pre}layered_coloring", min_layer=1)

    for v in tn.t_nodes.tolist():
        seen = [int(coloring.col[w]) for w in g.adj[v] if coloring.col[w] > 0]
        assert seen.count(1) >= 2, "T-node lost its repeated color"
        free = sorted(set(range(1, delta + 1)) - set(seen))
        coloring.col[v] = free[0]
    if tn.t_nodes.size:
        ledger.record(f"{pre}t_node_coloring", "superstep", 1)
    color_family(g, chosen, coloring, ledger, f"{pre}family")

    rep = verify_proper_coloring(g, coloring.col, delta)
    if not rep.summary:
        raise ColoringFailure(f"output failed verification: {rep.failures()[0]}")
    coloring.info.update({
        "d": d, "size_cap": size_cap, "family_size": len(family), "ruling_output": len(chosen),
        "coverage_radius": coverage, "participants": int(len(participants)), "t_nodes_sampled": tn.sampled,
        "t_nodes": int(tn.t_nodes.size), "t_nodes_renounced": len(tn.renounced), "h_layers": part.h,
    })
    return coloring

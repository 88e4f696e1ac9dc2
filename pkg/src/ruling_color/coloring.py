"""Deterministic Δ-coloring.

Outline of :func:`delta_color_deterministic`:

1. every vertex picks the smallest NLΔEC within radius 2⌈log_{Δ-1} n⌉;
2. the distinct picks, with their natural orchids, go through
   :func:`ruling_subgraphs` (k = 16⌈log_{Δ-1} n⌉ + 4, t = 4, d = 1);
3. everything outside the surviving members is layered by distance to them
   and colored from the farthest layer inwards;
4. each surviving member gets a flexible node and is colored last.

Layer convention: layer index is a distance, colored in decreasing order.
A vertex's up-degree counts neighbours in layers >= its own, the ones that
are colored before or alongside it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import _frontier_neighbors
from .graph import Graph, local_bfs
from .ruling import RulingFn, deterministic_ruling, ruling_subgraphs
from .runtime import RoundLedger, SuperstepProgram, ceil_log, charge_ball, run_superstep
from .structures import LOW_DEGREE, NLdec, NldecSearch, natural_orchid
from .symmetry import _restrict, linial_coloring
from .verify import verify_brooks_preconditions, verify_proper_coloring


class BrooksViolation(ValueError):
    """Input has Δ < 3 or a component that is a (Δ+1)-clique."""


class ListDeficit(ValueError):
    def __init__(self, vertex_id: int, size: int, up_degree: int):
        super().__init__(f"vertex {vertex_id}: list of {size} colors but up-degree {up_degree}")
        self.vertex_id = vertex_id


class ColoringFailure(RuntimeError):
    pass


@dataclass
class PartialColoring:
    """Colors 1..Δ per vertex; 0 stands for uncolored."""

    col: np.ndarray
    delta: int
    info: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, g: Graph) -> "PartialColoring":
        return cls(np.zeros(g.n, dtype=np.int64), g.delta)

    def colored(self) -> np.ndarray:
        return self.col > 0

    def is_total(self) -> bool:
        return bool(np.all(self.col > 0))

    def conflicts(self, g: Graph) -> np.ndarray:
        e = g.edge_array()
        a, b = self.col[e[:, 0]], self.col[e[:, 1]]
        return e[(a > 0) & (a == b)]

    def is_proper(self, g: Graph) -> bool:
        return self.conflicts(g).shape[0] == 0 and int(self.col.max(initial=0)) <= self.delta


@dataclass(frozen=True)
class LayeredPartition:
    layer: np.ndarray  # -1 for vertices outside the partition
    h: int

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.layer == i)


class _DistanceProgram(SuperstepProgram):
    """Multi-source BFS restricted to ``allowed``; one hop per round."""

    def __init__(self, sources: np.ndarray, allowed: np.ndarray):
        self.sources = sources
        self.allowed = allowed

    def init(self, graph):
        dist = np.full(graph.n, -1, dtype=np.int64)
        dist[self.sources] = 0
        return {"dist": dist, "frontier": np.unique(self.sources)}

    def step(self, graph, state, rnd):
        dist = state["dist"]
        nb = _frontier_neighbors(graph.indptr, graph.indices, state["frontier"])
        nb = np.unique(nb[(dist[nb] < 0) & self.allowed[nb]])
        dist[nb] = rnd
        return {"dist": dist, "frontier": nb}

    def halted(self, graph, state, rnd):
        return state["frontier"].size == 0


def layer_by_distance(g: Graph, targets, ledger: RoundLedger | None = None, phase: str = "layers",
                      allowed: np.ndarray | None = None) -> LayeredPartition:
    """Layer i = vertices at distance i from ``targets`` (inside ``allowed`` if given)."""
    src = np.unique(np.asarray(list(targets), dtype=np.int64))
    if src.size == 0 and g.n:
        raise ValueError("layering needs at least one target")
    if allowed is None:
        allowed = np.ones(g.n, dtype=bool)
    allowed = allowed.copy()
    allowed[src] = True
    state = run_superstep(g, _DistanceProgram(src, allowed), ledger, phase)
    dist = state["dist"]
    missing = np.flatnonzero(allowed & (dist < 0))
    if missing.size:
        raise ValueError(f"vertex {int(g.ids[missing[0]])} cannot reach any layering target")
    dist[~allowed] = -1
    return LayeredPartition(dist, int(dist.max(initial=0)))


def up_degrees(g: Graph, part: LayeredPartition, pending: np.ndarray) -> np.ndarray:
    """Per vertex: neighbours still pending whose layer is >= its own."""
    src = np.repeat(np.arange(g.n), g.degree)
    dst = g.indices
    hit = pending[dst] & (part.layer[dst] >= part.layer[src])
    return np.bincount(src[hit], minlength=g.n)


class _LayeredProgram(SuperstepProgram):
    """Round r colors one (layer, class) pair; layers descend, classes ascend."""

    def __init__(self, col: np.ndarray, schedule: list[np.ndarray], allowed: np.ndarray):
        self.col = col
        self.schedule = schedule
        self.allowed = allowed

    def init(self, graph):
        return self.col

    def halted(self, graph, state, rnd):
        return rnd >= len(self.schedule)

    def step(self, graph, col, rnd):
        verts = self.schedule[rnd - 1]
        if verts.size == 0:
            return col
        deg = graph.degree[verts]
        nb = _frontier_neighbors(graph.indptr, graph.indices, verts)
        rows = np.repeat(np.arange(verts.size), deg)
        used = np.zeros((verts.size, self.allowed.shape[1]), dtype=bool)
        used[rows, col[nb]] = True
        avail = self.allowed[verts] & ~used
        avail[:, 0] = False
        ok = avail.any(axis=1)
        if not ok.all():
            v = int(verts[np.argmin(ok)])
            raise ColoringFailure(f"vertex {int(graph.ids[v])} has no free color")
        col[verts] = np.argmax(avail, axis=1)
        return col


def color_layered(g: Graph, part: LayeredPartition, coloring: PartialColoring, lists: np.ndarray | None = None,
                  ledger: RoundLedger | None = None, phase: str = "layered_coloring",
                  min_layer: int = 0) -> PartialColoring:
    """Color every uncolored vertex with layer >= ``min_layer``, farthest layer first.

    ``lists`` is an optional boolean matrix of shape (n, Δ+1); column c says
    whether color c may be used (column 0 is ignored). Before any coloring
    each vertex's list minus its pre-colored neighbours' colors must exceed
    its up-degree; otherwise :class:`ListDeficit` names the vertex.
    """
    delta = coloring.delta
    if lists is None:
        lists = np.ones((g.n, delta + 1), dtype=bool)
    lists = lists.copy()
    lists[:, 0] = False
    col = coloring.col
    pending = (part.layer >= min_layer) & (col == 0)
    todo = np.flatnonzero(pending)
    if todo.size == 0:
        return coloring
    # residual lists against colors already fixed
    nb = _frontier_neighbors(g.indptr, g.indices, todo)
    rows = np.repeat(np.arange(todo.size), g.degree[todo])
    pre = np.zeros((todo.size, delta + 1), dtype=bool)
    pre[rows, col[nb]] = True
    pre[:, 0] = False
    residual = (lists[todo] & ~pre).sum(axis=1)
    updeg = up_degrees(g, part, pending)[todo]
    short = np.flatnonzero(residual < updeg + 1)
    if short.size:
        v = int(todo[short[0]])
        raise ListDeficit(int(g.ids[v]), int(residual[short[0]]), int(updeg[short[0]]))

    sub = _restrict(g, todo)
    classes = np.zeros(g.n, dtype=np.int64)
    lin = linial_coloring(sub, ledger, f"{phase}/linial")
    classes[todo] = lin.color
    schedule = []
    for layer in range(part.h, min_layer - 1, -1):
        in_layer = todo[part.layer[todo] == layer]
        for c in range(1, lin.palette_size + 1):
            schedule.append(in_layer[classes[in_layer] == c])
    run_superstep(g, _LayeredProgram(col, schedule, lists), ledger, f"{phase}/color")
    return coloring


# ---------------------------------------------------------- flexible nodes


def _neighbor_colors(g: Graph, col: np.ndarray, v: int) -> list[int]:
    return [int(col[w]) for w in g.adj[v] if col[w] > 0]


def create_flexible_node(c: NLdec, coloring: PartialColoring) -> int:
    """Return a stem vertex with two equally colored neighbours, coloring the root if needed.

    Low-degree nodes are returned as they are. Otherwise, if no stem vertex is
    flexible yet, the root takes a color seen around one of its induced
    degree-2 neighbours but absent around itself.
    """
    g = c.sub.host
    col = coloring.col
    if any(col[v] for v in c.sub.vertices):
        raise ValueError("structure must be uncolored")
    if c.kind == LOW_DEGREE:
        return c.root
    for v in c.stem:
        seen = _neighbor_colors(g, col, v)
        if len(seen) != len(set(seen)):
            return v
    root = c.root
    around_root = set(_neighbor_colors(g, col, root))
    for v in sorted(c.sub.adj[root]):
        if c.sub.degree(v) != 2:
            continue
        options = sorted(set(_neighbor_colors(g, col, v)) - around_root)
        if options:
            col[root] = options[0]
            rest = [x for x in c.sub.vertices if x != root]
            reach = local_bfs(c.sub.adj, [rest[0]], avoid=[root])
            assert len(reach) == len(rest), "uncolored part split by the root"
            return v
    raise ColoringFailure(f"no color makes a stem vertex of the structure at root {int(g.ids[root])} flexible")


def color_family(g: Graph, family: Sequence[NLdec], coloring: PartialColoring, ledger: RoundLedger | None = None,
                 phase: str = "family") -> PartialColoring:
    """Color the (uncolored) members last, spreading out from their flexible nodes."""
    if not family:
        return coloring
    flex = [create_flexible_node(c, coloring) for c in family]
    if ledger is not None:
        charge_ball(ledger, f"{phase}/flexible", 2)
    uncolored = coloring.col == 0
    part = layer_by_distance(g, flex, ledger, f"{phase}/layers", allowed=uncolored)
    return color_layered(g, part, coloring, ledger=ledger, phase=f"{phase}/coloring", min_layer=0)


# ---------------------------------------------------------------- pipeline


def pipeline_parameters(n: int, delta: int) -> dict:
    log = max(1, ceil_log(max(n, 2), delta - 1))
    return {"log": log, "radius": 2 * log, "k": 16 * log + 4, "t": 4, "d": 1}


def select_family(g: Graph, radius: int, ledger: RoundLedger | None, phase: str = "nldec_search") -> list[NLdec]:
    """Distinct NLΔECs picked by the vertices, in selection order."""
    if ledger is not None:
        charge_ball(ledger, phase, radius)
    picks = NldecSearch(g, radius).select()
    missing = [v for v, c in picks.items() if c is None]
    if missing:
        raise ColoringFailure(f"no NLΔEC within distance {radius} of vertex {int(g.ids[missing[0]])}")
    uniq = {c.sub.vertices: c for c in picks.values()}
    return sorted(uniq.values(), key=NLdec.key)


def delta_color_deterministic(g: Graph, ledger: RoundLedger | None = None,
                              ruling: RulingFn = deterministic_ruling) -> PartialColoring:
    """Proper coloring with colors 1..Δ; raises :class:`BrooksViolation` on invalid input."""
    report = verify_brooks_preconditions(g)
    if not report.summary:
        raise BrooksViolation(f"Brooks precondition violated: {report.failures()[0]}")
    ledger = RoundLedger() if ledger is None else ledger
    coloring = PartialColoring.empty(g)
    params = pipeline_parameters(g.n, g.delta)
    family = select_family(g, params["radius"], ledger)
    k = max(params["k"], max(len(c.sub) for c in family))
    orchids = [natural_orchid(c, params["d"], params["t"]) for c in family]
    result = ruling_subgraphs(orchids, k, params["t"], params["d"], ledger, ruling)
    chosen = [family[i] for i in result.selected]
    targets = sorted({v for c in chosen for v in c.sub.vertices})
    part = layer_by_distance(g, targets, ledger, "layers")
    color_layered(g, part, coloring, ledger=ledger, phase="layered_coloring", min_layer=1)
    color_family(g, chosen, coloring, ledger, "family")
    _final_check(g, coloring)
    coloring.info.update(params)
    coloring.info.update({
        "k_used": k,
        "family_size": len(family),
        "ruling_output": len(chosen),
        "coverage_radius": result.coverage_radius,
        "coverage_bound": result.coverage_bound,
        "h_layers": part.h,
        "ruling": result.metrics(),
    })
    return coloring


def _final_check(g: Graph, coloring: PartialColoring) -> None:
    rep = verify_proper_coloring(g, coloring.col, coloring.delta)
    if not rep.summary:
        raise ColoringFailure(f"output failed verification: {rep.failures()[0]}")

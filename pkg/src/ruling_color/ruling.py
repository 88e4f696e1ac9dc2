"""Ruling subgraph families.

Given a family of small connected subgraphs, each with an orchid (a short stem
around a root, thickened by radius ``d``), keep a subfamily in which no member
touches another member's orchid, while every discarded member stays close to
a kept one.

Pipeline, in order:

1. ``elimination_walk``: tokens walk their stems; colliding tokens die.
2. ``ruling_orchids``: ruling set on the distance-``d`` conflict graph.
3. ``directional_elimination_walk``: tokens walk their subgraphs and detour
   to every foreign stem they meet.
4. For ``i = 1, 2, ...``: ``outdegree_reduction`` (ruling set on a sibling
   graph) then ``pausing_elimination_walk`` (detours pause at branch nodes).
5. ``final_mis`` on the contention digraph.

Every elimination records who absorbed the member and the host distance
between the two roots, so coverage is measured instead of bounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .graph import Graph, Subgraph, local_bfs
from .runtime import RoundLedger, SuperstepProgram, VirtualGraph, log_star, run_superstep
from .symmetry import linial_coloring, mis_from_coloring, randomized_ruling_set, ruling_set_from_coloring


@dataclass(frozen=True, eq=False)
class Orchid:
    """A subgraph with a rooted stem and the halo of radius ``d`` around the stem."""

    sub: Subgraph
    root: int
    stem: tuple[int, ...]
    halo: np.ndarray
    t: int
    d: int

    @classmethod
    def build(cls, sub: Subgraph, root: int, stem: Sequence[int], d: int, t: int | None = None) -> "Orchid":
        stem = tuple(sorted(set(int(v) for v in stem)))
        t = len(stem) if t is None else int(t)
        if d < 0:
            raise ValueError("d must be nonnegative")
        if not set(stem) <= sub.vset:
            raise ValueError("stem must lie inside the subgraph")
        if root not in stem:
            raise ValueError("root must be a stem vertex")
        if len(stem) > t:
            raise ValueError(f"stem has {len(stem)} vertices, more than t={t}")
        stem_adj = {v: tuple(u for u in sub.adj[v] if u in stem) for v in stem}
        if len(local_bfs(stem_adj, [root])) != len(stem):
            raise ValueError("stem must be connected")
        halo = np.flatnonzero(sub.host.bfs(stem, limit=d) >= 0)
        return cls(sub, int(root), stem, halo, t, int(d))

    @cached_property
    def halo_set(self) -> frozenset[int]:
        return frozenset(self.halo.tolist())

    @cached_property
    def stem_adj(self) -> dict[int, tuple[int, ...]]:
        s = set(self.stem)
        return {v: tuple(u for u in self.sub.adj[v] if u in s) for v in self.stem}

    @property
    def host(self) -> Graph:
        return self.sub.host


# ------------------------------------------------------------------- walks


def tree_walk(adj, root: int) -> list[int]:
    """Closed walk from ``root`` along a DFS of the BFS tree; 2(|V|-1) steps."""
    children: dict[int, list[int]] = {root: []}
    order = [root]
    for u in order:
        for w in sorted(adj[u]):
            if w not in children:
                children[w] = []
                children[u].append(w)
                order.append(w)
    walk = [root]
    stack = [(root, iter(children[root]))]
    while stack:
        nxt = next(stack[-1][1], None)
        if nxt is None:
            stack.pop()
            if stack:
                walk.append(stack[-1][0])
        else:
            walk.append(nxt)
            stack.append((nxt, iter(children[nxt])))
    return walk


def branch_nodes(orchid: Orchid, x: int) -> list[int]:
    """Stem vertices at positions min(2t, ⌈t/x⌉ + j⌈2t/x⌉), j < x, of the padded stem walk.

    The returned list has x entries (repeats allowed); every stem vertex lies
    within stem distance t/x of one of them.
    """
    if x < 1:
        raise ValueError("need at least one branch node")
    t = orchid.t
    walk = tree_walk(orchid.stem_adj, orchid.root)
    walk = walk + [orchid.root] * (2 * t + 1 - len(walk))
    step = -(-2 * t // x)
    first = -(-t // x)
    return [walk[min(2 * t, first + j * step)] for j in range(x)]


# ----------------------------------------------------------- virtual graphs


def _members_by_priority(family: Sequence[Orchid], members: Sequence[int] | None = None) -> list[int]:
    idx = range(len(family)) if members is None else members
    return sorted(idx, key=lambda i: _priority(family[i]))


def _priority(o: Orchid) -> tuple:
    return (int(o.host.ids[o.root]), o.sub.id_key())


def _virtual(family: Sequence[Orchid], members: list[int], edges, dilation: int, directed=False) -> VirtualGraph:
    host = family[0].host if family else Graph.from_edges(0, [])
    reps = np.array([family[i].root for i in members], dtype=np.int64)
    e = np.asarray(sorted(set(map(tuple, edges))), dtype=np.int64).reshape(-1, 2)
    return VirtualGraph(tuple(members), e, max(1, int(dilation)), reps, host, directed)


def _halo_owners(family: Sequence[Orchid], members: list[int]) -> dict[int, list[int]]:
    """Vertex -> positions (in ``members``) of orchids whose halo contains it."""
    owners: dict[int, list[int]] = {}
    for pos, i in enumerate(members):
        for v in family[i].halo.tolist():
            owners.setdefault(v, []).append(pos)
    return owners


def conflict_graph(family: Sequence[Orchid], d: int, members: list[int] | None = None) -> VirtualGraph:
    """Members adjacent when their orchids are within host distance ``d``."""
    members = _members_by_priority(family, members)
    if not members:
        return _virtual(family, [], [], 1)
    owners = _halo_owners(family, members)
    g = family[members[0]].host
    edges = []
    for pos, i in enumerate(members):
        near = np.flatnonzero(g.bfs(family[i].halo, limit=d) >= 0)
        hit = set()
        for v in near.tolist():
            hit.update(owners.get(v, ()))
        edges.extend((pos, q) for q in hit if q > pos)
    t = max(o.t for o in (family[i] for i in members))
    return _virtual(family, members, edges, 2 * t + 3 * d)


def contention_digraph(family: Sequence[Orchid], members: list[int] | None = None) -> VirtualGraph:
    """Directed edge (H, H') whenever H meets the orchid of H' (H != H')."""
    members = _members_by_priority(family, members)
    if not members:
        return _virtual(family, [], [], 1, directed=True)
    owners = _halo_owners(family, members)
    edges = []
    for pos, i in enumerate(members):
        hit = set()
        for v in family[i].sub.vertices:
            hit.update(owners.get(v, ()))
        hit.discard(pos)
        edges.extend((pos, q) for q in hit)
    k = max(len(family[i].sub) for i in members)
    d = max(family[i].d for i in members)
    t = max(family[i].t for i in members)
    return _virtual(family, members, edges, k + d + t, directed=True)


def sibling_graph(family: Sequence[Orchid], x: int, members: list[int] | None = None) -> VirtualGraph:
    """Members adjacent when their orchids meet a common member within ``x`` hops inside it."""
    members = _members_by_priority(family, members)
    if not members:
        return _virtual(family, [], [], 1)
    owners = _halo_owners(family, members)
    edges = set()
    for i in members:
        h = family[i].sub
        points: dict[int, list[int]] = {}
        for v in h.vertices:
            for q in owners.get(v, ()):
                points.setdefault(q, []).append(v)
        if len(points) < 2:
            continue
        keys = sorted(points)
        for a_pos, a in enumerate(keys):
            reach = local_bfs(h.adj, points[a], limit=x)
            for b in keys[a_pos + 1:]:
                if any(v in reach for v in points[b]):
                    edges.add((a, b))
    d = max(family[i].d for i in members)
    t = max(family[i].t for i in members)
    return _virtual(family, members, sorted(edges), x + 2 * d + 2 * t)


# ------------------------------------------------------------ family state


@dataclass(frozen=True)
class Link:
    member: int
    absorbed_by: int
    phase: str
    distance: int  # host distance between the two roots
    walk: int  # postmortem walk length, or virtual hops for ruling phases


@dataclass
class FamilyState:
    """Mutable record of a run: who is alive, why others died, bounds per stage."""

    family: list[Orchid]
    k: int
    t: int
    d: int
    ledger: RoundLedger
    prefix: str = "ruling"
    alive: np.ndarray = None
    stage: str = "input"
    links: list[Link] = field(default_factory=list)
    phase_max: dict[str, int] = field(default_factory=dict)
    snapshots: list[dict] = field(default_factory=list)
    schedule: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.alive is None:
            self.alive = np.ones(len(self.family), dtype=bool)
        self._walks: dict[int, list[int]] = {}

    @property
    def host(self) -> Graph:
        return self.family[0].host

    def members(self) -> list[int]:
        return _members_by_priority(self.family, np.flatnonzero(self.alive).tolist())

    def sigma(self, i: int) -> list[int]:
        if i not in self._walks:
            o = self.family[i]
            self._walks[i] = tree_walk(o.sub.adj, o.root)
        return self._walks[i]

    def rho(self, i: int) -> list[int]:
        o = self.family[i]
        return tree_walk(o.stem_adj, o.root)

    def phase(self, name: str) -> str:
        return f"{self.prefix}/{name}"

    def root_distance(self, a: int, b: int) -> int:
        ra, rb = self.family[a].root, self.family[b].root
        return int(self.host.bfs([ra])[rb])

    def absorb(self, member: int, by: int, phase: str, walk: int) -> Link:
        link = Link(member, by, phase, self.root_distance(member, by), int(walk))
        self.links.append(link)
        self.alive[member] = False
        self.phase_max[phase] = max(self.phase_max.get(phase, 0), link.distance)
        return link

    def snapshot(self, stage: str, checks: list[tuple[str, float, float]], **extra) -> dict:
        self.stage = stage
        snap = {"stage": stage, "alive": int(self.alive.sum()),
                "checks": [{"name": n, "measured": m, "bound": b} for n, m, b in checks]}
        snap.update(extra)
        self.snapshots.append(snap)
        return snap

    def contention(self) -> VirtualGraph:
        return contention_digraph(self.family, self.members())

    def chain(self, member: int) -> list[Link]:
        by_member = {lk.member: lk for lk in self.links}
        out = []
        while member in by_member:
            out.append(by_member[member])
            member = out[-1].absorbed_by
        return out


def _degrees(vg: VirtualGraph) -> tuple[int, int]:
    if vg.size == 0:
        return 0, 0
    return int(vg.out_degrees().max()), int(vg.in_degrees().max())


# ------------------------------------------------------------- token walks


class _TokenWalk(SuperstepProgram):
    """Tokens follow precomputed scripts; at each vertex only the highest rank survives."""

    def __init__(self, scripts: list[list[int]], n: int, budget: int):
        self.n = n
        self.budget = budget
        m = len(scripts)
        self.lengths = np.array([len(s) - 1 for s in scripts], dtype=np.int64)
        width = int(self.lengths.max()) + 1 if m else 1
        pos = np.empty((m, width), dtype=np.int64)
        for i, s in enumerate(scripts):
            pos[i, :len(s)] = s
            pos[i, len(s):] = s[-1]
        self.pos = pos
        # scripts arrive in priority order, so rank is the position
        self.rank = np.arange(m, dtype=np.int64)

    def init(self, graph):
        m = self.pos.shape[0]
        state = {"alive": np.ones(m, dtype=np.bool_), "elim_time": np.full(m, -1, dtype=np.int64),
                 "eliminator": np.full(m, -1, dtype=np.int64)}
        self._replay(state, 0)
        return state

    def _replay(self, state, tau):
        _kernels.replay_tokens(self.pos, self.rank, self.n, state["alive"], state["elim_time"],
                               state["eliminator"], tau, tau + 1)

    def step(self, graph, state, rnd):
        self._replay(state, rnd)
        return state

    def halted(self, graph, state, rnd):
        return rnd >= self.budget


def _run_walk(state: FamilyState, members: list[int], scripts: list[list[int]], budget: int,
              phase: str) -> dict:
    """Run token scripts for ``budget`` rounds and absorb eliminated members.

    Returns telemetry: longest script, longest postmortem walk, eliminations.
    """
    lengths = [len(s) - 1 for s in scripts]
    longest = max(lengths, default=0)
    assert longest <= budget, f"{phase}: script of {longest} steps exceeds budget {budget}"
    prog = _TokenWalk(scripts, state.host.n, budget)
    out = run_superstep(state.host, prog, state.ledger, phase)
    alive, et, el = out["alive"], out["elim_time"], out["eliminator"]
    postmortem = 0
    for pos in np.flatnonzero(~alive).tolist():
        j, last = pos, 0
        while not alive[j]:
            last = int(et[j])
            j = int(el[j])
        walk = max(lengths[j], last)
        postmortem = max(postmortem, walk)
        assert walk <= budget, f"{phase}: postmortem walk {walk} exceeds {budget}"
        state.absorb(members[pos], members[j], phase, walk)
    state.phase_max.setdefault(phase, 0)
    return {"longest_script": longest, "postmortem_max": postmortem, "eliminated": int((~alive).sum()),
            "budget": budget}


def _path_down(dist: dict[int, int], adj, x: int) -> list[int]:
    path = [x]
    while dist[path[-1]] > 0:
        cur = path[-1]
        path.append(min(w for w in adj[cur] if dist.get(w, -1) == dist[cur] - 1))
    return path


def _detour_scripts(state: FamilyState, members: list[int], targets: dict[int, list[int]], pause: int,
                    reach: int) -> list[list[int]]:
    """σ-walks with a detour to ``targets[o]`` (and a pause) at each first entry into orchid ``o``."""
    fam = state.family
    g = state.host
    owners = _halo_owners(fam, members)
    dists: dict[int, dict[int, int]] = {}

    def dist_map(q: int) -> dict[int, int]:
        if q not in dists:
            arr = g.bfs(targets[members[q]], limit=reach)
            hit = np.flatnonzero(arr >= 0)
            dists[q] = dict(zip(hit.tolist(), arr[hit].tolist()))
        return dists[q]

    scripts = []
    for pos, i in enumerate(members):
        seen = {pos}
        out: list[int] = []
        for x in state.sigma(i):
            out.append(x)
            for q in owners.get(x, ()):
                if q in seen:
                    continue
                seen.add(q)
                path = _path_down(dist_map(q), g.adj, x)
                out.extend(path[1:])
                out.extend([path[-1]] * pause)
                out.extend(reversed(path[:-1]))
        scripts.append(out)
    return scripts


def elimination_walk(state: FamilyState) -> FamilyState:
    """Tokens walk their stems for 2t rounds; every collision keeps only the highest token."""
    members = state.members()
    phase = state.phase("elimination_walk")
    tele = _run_walk(state, members, [state.rho(i) for i in members], 2 * state.t, phase)
    assert tele["postmortem_max"] <= 2 * state.t
    cg = conflict_graph(state.family, state.d, state.members())
    delta = state.host.delta
    state.snapshot("elimination_walk",
                   [("conflict_max_degree", cg.max_degree(), 2 * state.t**2 * delta ** (3 * state.d)),
                    ("postmortem_walk", tele["postmortem_max"], 2 * state.t)],
                   **tele)
    return state


# ---------------------------------------------------------- ruling phases

RulingFn = Callable[[VirtualGraph, RoundLedger, str], np.ndarray]


def deterministic_ruling(vg: VirtualGraph, ledger: RoundLedger, phase: str) -> np.ndarray:
    """(2, max(1, ⌈log₂ Δ⌉))-ruling set via Linial coloring."""
    delta = vg.max_degree()
    c = max(1, math.ceil(math.log2(delta))) if delta > 1 else 1
    col = linial_coloring(vg, ledger, f"{phase}/linial")
    return ruling_set_from_coloring(vg, col, c, ledger, f"{phase}/ruling_set").members


def randomized_ruling(seed: int) -> RulingFn:
    def run(vg: VirtualGraph, ledger: RoundLedger, phase: str) -> np.ndarray:
        return randomized_ruling_set(vg, seed, ledger, phase).members
    return run


def _absorb_into(state: FamilyState, vg: VirtualGraph, keep: np.ndarray, phase: str) -> int:
    """Absorb every non-kept member into its nearest kept member in ``vg``. Returns max hops."""
    comm = vg.comm
    keep = np.asarray(keep, dtype=np.int64)
    owner = np.full(vg.size, -1, dtype=np.int64)
    hops = np.full(vg.size, -1, dtype=np.int64)
    owner[keep] = keep
    hops[keep] = 0
    frontier = sorted(keep.tolist())
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for u in frontier:
            for w in comm.adj[u]:
                if owner[w] < 0:
                    owner[w] = owner[u]
                    hops[w] = depth
                    nxt.append(w)
        frontier = sorted(nxt)
    assert np.all(owner >= 0), f"{phase}: ruling set does not dominate"
    state.phase_max.setdefault(phase, 0)
    for pos in np.flatnonzero(hops > 0).tolist():
        link = state.absorb(vg.members[pos], vg.members[int(owner[pos])], phase, int(hops[pos]))
        assert link.distance <= link.walk * vg.dilation, f"{phase}: dilation bound broken"
    return int(hops.max()) if hops.size else 0


def ruling_orchids(state: FamilyState, ruling: RulingFn = deterministic_ruling) -> FamilyState:
    """Ruling set on the distance-d conflict graph."""
    phase = state.phase("ruling_orchids")
    cg = conflict_graph(state.family, state.d, state.members())
    keep = ruling(cg, state.ledger, phase)
    hops = _absorb_into(state, cg, keep, phase)
    after = conflict_graph(state.family, state.d, state.members())
    out_max, in_max = _degrees(state.contention())
    checks = [("conflict_edges", int(after.undirected_edges().shape[0]), 0)]
    if state.d > 0:
        checks.append(("contention_outdegree", out_max, 2 * state.k / state.d))
    state.snapshot("ruling_orchids", checks, ruling_hops=hops, dilation=cg.dilation,
                   outdegree=out_max, indegree=in_max)
    return state


def directional_elimination_walk(state: FamilyState) -> FamilyState:
    """σ-walks with a there-and-back detour to the stem of each newly met orchid."""
    members = state.members()
    k, t, d = state.k, state.t, state.d
    detours = 2 * k // d if d > 0 else 0
    budget = 2 * k + detours * 2 * d
    targets = {i: list(state.family[i].stem) for i in members}
    scripts = _detour_scripts(state, members, targets, 0, d)
    tele = _run_walk(state, members, scripts, budget, state.phase("directional_walk"))
    out_max, in_max = _degrees(state.contention())
    state.snapshot("directional_walk",
                   [("contention_indegree", in_max, 6 * k * t), ("postmortem_walk", tele["postmortem_max"], 6 * k)],
                   outdegree=out_max, indegree=in_max, **tele)
    return state


def iter_log(k: float, i: int) -> float:
    """log⁽ⁱ⁾ k in base 2, each application clamped below at 2; log⁽⁰⁾ k = k."""
    x = float(k)
    for _ in range(i):
        x = max(2.0, math.log2(x))
    return x


def outdegree_reduction(state: FamilyState, i: int, ruling: RulingFn = deterministic_ruling) -> FamilyState:
    """Ruling set on the sibling graph with connecting distance ⌊4k/(log⁽ⁱ⁾k)²⌋."""
    lg = iter_log(state.k, i)
    x = int(math.floor(4 * state.k / lg**2))
    before_out, before_in = _degrees(state.contention())
    sg = sibling_graph(state.family, x, state.members())
    phase = state.phase(f"outdegree_reduction_{i}")
    keep = ruling(sg, state.ledger, phase)
    hops = _absorb_into(state, sg, keep, phase)
    out_max, in_max = _degrees(state.contention())
    state.schedule.append({"i": i, "log_i_k": lg, "d_i": 4 * state.k / lg**2, "x": x})
    state.snapshot(f"outdegree_reduction_{i}",
                   [("sibling_max_degree", sg.max_degree(), (before_in + 1) * before_out),
                    ("contention_outdegree", out_max, lg**2 / 2)],
                   outdegree=out_max, indegree=in_max, ruling_hops=hops, dilation=sg.dilation, x=x)
    return state


def pausing_elimination_walk(state: FamilyState, i: int) -> FamilyState:
    """Detours go to the nearest of p branch nodes and pause there for ℓ rounds."""
    members = state.members()
    out_max, _ = _degrees(state.contention())
    p = 2 * out_max
    entry = state.schedule[-1] if state.schedule and state.schedule[-1]["i"] == i else {"i": i}
    entry.update(p=p)
    stage = f"pausing_walk_{i}"
    lg = iter_log(state.k, i)
    if p == 0:
        entry.update(ell=0, budget=0)
        state.snapshot(stage, [("contention_outdegree", 0, lg**2 / 2)], outdegree=0, indegree=0, skipped=True)
        return state
    k, t, d = state.k, state.t, state.d
    ell = -(-4 * k // p)
    budget = 2 * k + (p // 2) * (ell + 2 * (d + -(-t // p)))
    targets = {j: branch_nodes(state.family[j], p) for j in members}
    scripts = _detour_scripts(state, members, targets, ell, d + t)
    tele = _run_walk(state, members, scripts, budget, state.phase(stage))
    entry.update(ell=ell, budget=budget)
    new_out, new_in = _degrees(state.contention())
    t_max = tele["longest_script"]
    state.snapshot(stage,
                   [("contention_indegree", new_in, p * (t_max / ell + 1)),
                    ("contention_outdegree", new_out, lg**2 / 2),
                    ("postmortem_walk", tele["postmortem_max"], budget)],
                   outdegree=new_out, indegree=new_in, p=p, ell=ell, t_max=t_max, **tele)
    return state


def final_mis(state: FamilyState) -> FamilyState:
    """MIS of the (undirected) contention digraph."""
    cd = state.contention()
    phase = state.phase("final_mis")
    col = linial_coloring(cd, state.ledger, f"{phase}/linial")
    keep = mis_from_coloring(cd, col, state.ledger, f"{phase}/mis")
    _absorb_into(state, cd, keep, phase)
    after = state.contention()
    state.snapshot("final_mis", [("contention_edges", int(after.edges.shape[0]), 0)])
    return state


# ---------------------------------------------------------------- driver


@dataclass
class RulingResult:
    state: FamilyState
    selected: list[int]  # indices into the input family
    coverage_radius: int
    coverage_bound: int

    @property
    def family(self) -> list[Orchid]:
        return [self.state.family[i] for i in self.selected]

    def metrics(self) -> dict:
        st = self.state
        return {
            "input_size": len(st.family),
            "output_size": len(self.selected),
            "k": st.k, "t": st.t, "d": st.d,
            "coverage_radius": self.coverage_radius,
            "coverage_bound": self.coverage_bound,
            "phase_max": dict(st.phase_max),
            "stages": st.snapshots,
            "schedule": st.schedule,
        }


def stop_iterating(k: int, i: int, n: int) -> bool:
    return iter_log(k, i) ** 4 <= max(log_star(n), 16)


def ruling_subgraphs(family: Sequence[Orchid], k: int, t: int, d: int, ledger: RoundLedger,
                     ruling: RulingFn = deterministic_ruling, prefix: str = "ruling",
                     orchid_ruling: RulingFn | None = None) -> RulingResult:
    """Subfamily with an empty contention digraph that stays close to every input member.

    ``ruling`` computes the ruling sets on virtual graphs; ``orchid_ruling``,
    if given, replaces it for the conflict-graph step only.
    """
    family = list(family)
    if not family:
        return RulingResult(FamilyState([], k, t, d, ledger, prefix), [], 0, 0)
    for o in family:
        if len(o.sub) > k:
            raise ValueError(f"member with {len(o.sub)} vertices exceeds k={k}")
        if len(o.stem) > t:
            raise ValueError(f"stem with {len(o.stem)} vertices exceeds t={t}")
        if o.d != d:
            raise ValueError("orchid radius differs from d")
        if not o.sub.is_connected():
            raise ValueError("members must be connected")
    state = FamilyState(family, k, t, d, ledger, prefix)
    elimination_walk(state)
    ruling_orchids(state, orchid_ruling or ruling)
    if d == 0 or 2 * k / d >= 1:
        directional_elimination_walk(state)
        n = state.host.n
        i = 1
        while True:
            outdegree_reduction(state, i, ruling)
            pausing_elimination_walk(state, i)
            if stop_iterating(k, i, n):
                break
            i += 1
        final_mis(state)
    selected = sorted(np.flatnonzero(state.alive).tolist())
    radius = coverage_radius(family, selected)
    return RulingResult(state, selected, radius, sum(state.phase_max.values()))


def coverage_radius(family: Sequence[Orchid], selected: Sequence[int]) -> int:
    """max over members H of min over selected H' of dist(V(H), V(H'))."""
    if not family:
        return 0
    g = family[0].host
    src = sorted({v for i in selected for v in family[i].sub.vertices})
    dist = g.bfs(src)
    worst = 0
    for o in family:
        dv = dist[list(o.sub.vertices)]
        dv = dv[dv >= 0]
        if dv.size == 0:
            return -1
        worst = max(worst, int(dv.min()))
    return worst

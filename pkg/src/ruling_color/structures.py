"""Degree-choosable structures and the search for NLΔECs.

An NLΔEC is either a vertex of degree below Δ or a *nice* LDCC: an induced
theta subgraph (two vertices of induced degree 3 joined by three internally
disjoint paths). Both can always be colored last inside a Δ-coloring.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import Graph, Subgraph, _decompose, _is_clique, _is_cycle, block_decomposition, is_gallai_tree, local_path
from .ruling import Orchid

LOW_DEGREE = "low_degree_node"
NICE_LDCC = "nice_ldcc"


class NotAnLDCC(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NLdec:
    kind: str
    sub: Subgraph
    root: int
    stem: tuple[int, ...]

    @classmethod
    def low_degree(cls, g: Graph, v: int) -> "NLdec":
        if g.degree[v] >= g.delta:
            raise ValueError(f"vertex {int(g.ids[v])} has full degree")
        return cls(LOW_DEGREE, Subgraph(g, (v,)), v, (v,))

    @classmethod
    def nice(cls, sub: Subgraph) -> "NLdec":
        ids = sub.host.ids
        hubs = [v for v in sub.vertices if sub.degree(v) == 3]
        root = max(hubs, key=lambda v: ids[v])
        return cls(NICE_LDCC, sub, root, tuple(sorted((root,) + sub.adj[root])))

    def key(self) -> tuple:
        """Selection order: fewer vertices, then smaller root ID, then ID list."""
        ids = self.sub.host.ids
        return (len(self.sub), int(ids[self.root]), self.sub.id_key())


# ---------------------------------------------------------------- predicates


def is_two_connected(sub: Subgraph) -> bool:
    if len(sub) < 2 or not sub.is_connected():
        return False
    return len(block_decomposition(sub).blocks) == 1


def is_dcc(sub: Subgraph) -> bool:
    return is_two_connected(sub) and not is_gallai_tree(sub)


def is_ldcc(sub: Subgraph) -> bool:
    return is_dcc(sub) and not _is_cycle(sub.vertices, sub.adj)


def is_nice_ldcc(sub: Subgraph) -> bool:
    degs = sorted(sub.degree(v) for v in sub.vertices)
    if degs.count(3) != 2 or any(d != 2 for d in degs[:-2]):
        return False
    return is_ldcc(sub)


# -------------------------------------------------------------------- cycles


def find_induced_cycle(sub: Subgraph) -> list[int]:
    """Chordless cycle built by shortcutting a path around a middle vertex.

    Take a path u - m - w with u, w non-adjacent, a shortest u-w path P that
    avoids m, and cut P at its first vertex adjacent to m.
    """
    if not is_ldcc(sub):
        raise NotAnLDCC("find_induced_cycle needs an LDCC")
    adj = sub.adj
    ids = sub.host.ids
    for m in sorted(sub.vertices, key=lambda v: ids[v]):
        nb = sorted(adj[m], key=lambda v: ids[v])
        for i, u in enumerate(nb):
            for w in nb[i + 1:]:
                if w in adj[u]:
                    return [m, u, w]
                path = local_path(adj, u, w, avoid=(m,))
                if path is None:
                    continue
                cut = next(j for j in range(1, len(path)) if m in adj[path[j]])
                return [m] + path[:cut + 1]
    raise NotAnLDCC("no induced cycle found")  # unreachable for 2-connected input


def shortest_cycle(adj: Mapping[int, Sequence[int]], vertices: Sequence[int]) -> list[int] | None:
    """A minimum-length cycle (hence chordless), smallest vertex tuple on ties."""
    best: tuple[int, tuple[int, ...], list[int]] | None = None
    for s in sorted(vertices):
        parent = {s: -1}
        depth = {s: 0}
        frontier = [s]
        found = None
        while frontier and found is None:
            if best is not None and 2 * depth[frontier[0]] + 1 > best[0]:
                break
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w == parent[u]:
                        continue
                    if w not in depth:
                        depth[w] = depth[u] + 1
                        parent[w] = u
                        nxt.append(w)
                        continue
                    pu, pw = [u], [w]
                    while pu[-1] != s:
                        pu.append(parent[pu[-1]])
                    while pw[-1] != s:
                        pw.append(parent[pw[-1]])
                    if len(set(pu) & set(pw)) != 1:
                        continue
                    cyc = pu[::-1] + pw[:-1]
                    cand = (len(cyc), tuple(sorted(cyc)), cyc)
                    if found is None or cand[:2] < found[:2]:
                        found = cand
            frontier = nxt
        if found is not None and (best is None or found[:2] < best[:2]):
            best = found
        if best is not None and best[0] == 3:
            break
    return None if best is None else best[2]


def _max_clique(adj: Mapping[int, Sequence[int]], vertices: Sequence[int]) -> tuple[int, ...]:
    best: tuple[int, ...] = ()

    def grow(clique: list[int], cand: list[int]):
        nonlocal best
        if not cand:
            key = tuple(sorted(clique))
            if len(key) > len(best) or (len(key) == len(best) and key < best):
                best = key
            return
        if len(clique) + len(cand) < len(best):
            return
        for i, v in enumerate(cand):
            nbrs = set(adj[v])
            grow(clique + [v], [w for w in cand[i + 1:] if w in nbrs])

    for v in sorted(vertices):
        grow([v], sorted(w for w in adj[v] if w > v))
    return best


def _clean_paths(adj, start: int, core: set[int], boundary: set[int]) -> dict[int, list[int]]:
    """Shortest paths from ``start`` to other boundary vertices whose interior
    avoids both the core and the boundary."""
    parent = {start: -1}
    frontier = [start]
    hits: dict[int, list[int]] = {}
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w in parent or w in core:
                    continue
                parent[w] = u
                if w in boundary:
                    path = [w]
                    while path[-1] != start:
                        path.append(parent[path[-1]])
                    hits[w] = path[::-1]
                else:
                    nxt.append(w)
        frontier = sorted(nxt)
    return hits


def extract_nice_ldcc(sub: Subgraph) -> NLdec:
    """Shrink an LDCC to a nice LDCC inside it.

    A triangle means we grow a maximum clique K and close a theta through one
    short path leaving K. Otherwise we take a minimum induced cycle C and add
    the cheapest clean ear between two distinct attachment points.
    """
    if not is_ldcc(sub):
        raise NotAnLDCC("extract_nice_ldcc needs an LDCC")
    if is_nice_ldcc(sub):
        return NLdec.nice(sub)
    adj = sub.adj
    cyc = shortest_cycle(adj, sub.vertices)
    if len(cyc) == 3:
        core = set(_max_clique(adj, sub.vertices))
    else:
        core = set(cyc)
    outside = sorted({w for v in core for w in adj[v]} - core)
    attach = {v: sorted(core.intersection(adj[v])) for v in outside}
    for v in outside:
        if len(attach[v]) >= 2:
            if len(cyc) == 3:
                a, b = attach[v][:2]
                c = min(core - set(adj[v]))
                return NLdec.nice(sub.induced({v, a, b, c}))
            return NLdec.nice(sub.induced(core | {v}))
    boundary = set(outside)
    pos = {v: i for i, v in enumerate(cyc)} if len(cyc) > 3 else {}
    best = None
    for v in outside:
        for w, path in _clean_paths(adj, v, core, boundary).items():
            a, b = attach[v][0], attach[w][0]
            if a == b or w < v:
                continue
            if pos:
                gap = abs(pos[a] - pos[b])
                arc = min(gap, len(cyc) - gap)
                cost = len(path) + arc + 1
            else:
                cost = len(path)
            cand = (cost, len(path), tuple(path))
            if best is None or cand < best:
                best = cand
    if best is None:
        raise NotAnLDCC("no ear found; input is not 2-connected")
    path = list(best[2])
    if pos:
        keep = core | set(path)
    else:
        a, b = attach[path[0]][0], attach[path[-1]][0]
        c = min(core - {a, b})
        keep = {a, b, c} | set(path)
    return NLdec.nice(sub.induced(keep))


# --------------------------------------------------------- candidate search


def _ldcc_blocks(order: Sequence[int], adj: Mapping[int, Sequence[int]]) -> list[tuple[int, ...]]:
    return [b for b in _decompose(order, adj).blocks
            if len(b) >= 4 and not _is_clique(b, adj) and not _is_cycle(b, adj)]


def ldcc_near(g: Graph, s: int, radius: int) -> Subgraph | None:
    """An LDCC inside ``ball(s, radius)`` grown from the shortest cycles around ``s``.

    BFS from ``s``; each non-tree edge adds the two tree paths to its ends to a
    vertex set W. After each addition we look for a block of G[W] that is
    neither a clique nor a cycle. Once every non-tree edge of the ball is in,
    W holds every vertex that lies on a cycle of the ball, so ``None`` means
    the ball contains no LDCC.
    """
    adj = g.adj
    depth = {s: 0}
    parent = {s: -1}
    queue = [s]
    head = 0
    inside: set[int] = {s}
    extra = 0
    seen_edges: set[tuple[int, int]] = set()
    while head < len(queue):
        u = queue[head]
        head += 1
        du = depth[u]
        for w in adj[u]:
            if w not in depth:
                if du < radius:
                    depth[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                continue
            if parent[u] == w or parent[w] == u:
                continue
            e = (u, w) if u < w else (w, u)
            if e in seen_edges:
                continue
            seen_edges.add(e)
            for x in e:
                while x != -1 and x not in inside:
                    inside.add(x)
                    x = parent[x]
            extra += 1
            if extra >= 2:
                order = sorted(inside)
                sub_adj = {x: tuple(y for y in adj[x] if y in inside) for x in order}
                found = _ldcc_blocks(order, sub_adj)
                if found:
                    block = min(found, key=lambda b: (len(b), b))
                    return Subgraph(g, block)
    return None


class NldecSearch:
    """Per-vertex choice of the smallest NLΔEC inside a ball of fixed radius.

    Candidates are every vertex of degree < Δ plus one nice LDCC per seed
    vertex (``ldcc_near`` followed by extraction). Vertex v then takes the
    smallest candidate that lies entirely inside ``ball(v, radius)``.
    """

    def __init__(self, g: Graph, radius: int):
        if radius < 1:
            raise ValueError("radius must be at least 1")
        self.g = g
        self.radius = radius
        self._extracted: dict[tuple[int, ...], NLdec] = {}
        self._seeded: dict[int, NLdec | None] = {}

    def seed_candidate(self, s: int) -> NLdec | None:
        if s not in self._seeded:
            block = ldcc_near(self.g, s, self.radius)
            cand = None
            if block is not None:
                cand = self._extracted.get(block.vertices)
                if cand is None:
                    cand = extract_nice_ldcc(block)
                    self._extracted[block.vertices] = cand
            self._seeded[s] = cand
        return self._seeded[s]

    def select(self, targets: Iterable[int] | None = None) -> dict[int, NLdec | None]:
        g, r = self.g, self.radius
        targets = list(range(g.n)) if targets is None else sorted(set(int(v) for v in targets))
        out: dict[int, NLdec | None] = {}
        low = g.degree < g.delta
        need = []
        if low.any():
            big = np.iinfo(np.int64).max
            key = np.where(low, g.ids, big)
            if len(targets) * 8 < g.n:
                best = {}
                for v in targets:
                    d = g.bfs([v], limit=r)
                    reach = key[d >= 0]
                    best[v] = int(reach.min())
            else:
                from ._kernels import flood_min
                flooded = flood_min(g.indptr, g.indices, key, r)
                best = {v: int(flooded[v]) for v in targets}
            cache: dict[int, NLdec] = {}
            for v in targets:
                if best[v] == big:
                    need.append(v)
                    continue
                u = g.index_of[best[v]]
                if u not in cache:
                    cache[u] = NLdec.low_degree(g, u)
                out[v] = cache[u]
        else:
            need = targets
        if not need:
            return out
        seeds = np.flatnonzero(g.bfs(need, limit=2 * r) >= 0).tolist()
        pool: dict[tuple[int, ...], NLdec] = {}
        for s in seeds:
            c = self.seed_candidate(s)
            if c is not None:
                pool.setdefault(c.sub.vertices, c)
        pending = np.zeros(g.n, dtype=bool)
        pending[need] = True
        for cand in sorted(pool.values(), key=NLdec.key):
            inside = pending.copy()
            for x in cand.sub.vertices:
                inside &= g.bfs([x], limit=r) >= 0
            for v in np.flatnonzero(inside).tolist():
                out[v] = cand
            pending &= ~inside
            if not pending.any():
                break
        for v in np.flatnonzero(pending).tolist():
            out[v] = None
        return out


def find_nldec(g: Graph, v: int, radius: int) -> NLdec | None:
    """Smallest NLΔEC found inside ``ball(v, radius)``, or ``None``."""
    return NldecSearch(g, radius).select([v])[v]


def natural_orchid(c: NLdec, d: int, t: int | None = None) -> Orchid:
    """Orchid whose stem is the root plus its neighbours inside the structure."""
    return Orchid.build(c.sub, c.root, c.stem, d, t)

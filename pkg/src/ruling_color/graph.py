"""Host graphs, induced subgraphs, distances, blocks and instance generators.

Vertices are stored as indices ``0..n-1`` ordered by their 64-bit IDs, so
index order and ID order agree. Every tie-break in the package still goes
through ``Graph.ids``.
"""
from __future__ import annotations

import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels

INF = math.inf


class GraphFormatError(ValueError):
    """Malformed edge-list input; the message carries the line number."""


class InfeasibleParams(ValueError):
    """Generator parameters that admit no valid instance."""


@dataclass(frozen=True, eq=False)
class Graph:
    indptr: np.ndarray
    indices: np.ndarray
    ids: np.ndarray
    delta: int

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], ids: Sequence[int] | None = None,
                   delta: int | None = None) -> "Graph":
        """Build a simple graph on ``n`` vertices; endpoints are positions in ``ids``."""
        if ids is None:
            id_arr = np.arange(n, dtype=np.int64)
        else:
            id_arr = np.asarray(ids, dtype=np.int64)
            if id_arr.shape != (n,):
                raise ValueError("need exactly one ID per vertex")
        if np.unique(id_arr).size != n:
            raise ValueError("vertex IDs must be distinct")
        order = np.argsort(id_arr, kind="stable")
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            u = int(e[e[:, 0] == e[:, 1]][0, 0])
            raise ValueError(f"self-loop at vertex {int(id_arr[u])}")
        e = rank[e]
        lo, hi = np.minimum(e[:, 0], e[:, 1]), np.maximum(e[:, 0], e[:, 1])
        key = lo * n + hi
        uniq, counts = np.unique(key, return_counts=True)
        if np.any(counts > 1):
            dup = int(uniq[counts > 1][0])
            a, b = divmod(dup, n)
            raise ValueError(f"duplicate edge {int(id_arr[order[a]])}-{int(id_arr[order[b]])}")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        perm = np.lexsort((dst, src))
        src, dst = src[perm], dst[perm]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        maxdeg = int(np.diff(indptr).max()) if n else 0
        if delta is None:
            delta = maxdeg
        elif delta < maxdeg:
            raise ValueError(f"Δ override {delta} below maximum degree {maxdeg}")
        return cls(indptr, dst.astype(np.int64), id_arr[order], int(delta))

    @property
    def n(self) -> int:
        return int(self.indptr.shape[0] - 1)

    @property
    def m(self) -> int:
        return int(self.indices.shape[0] // 2)

    @cached_property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def adj(self) -> list[tuple[int, ...]]:
        ip, ix = self.indptr, self.indices.tolist()
        return [tuple(ix[ip[v]:ip[v + 1]]) for v in range(self.n)]

    @cached_property
    def adj_sets(self) -> list[frozenset[int]]:
        return [frozenset(a) for a in self.adj]

    @cached_property
    def index_of(self) -> dict[int, int]:
        return {int(x): i for i, x in enumerate(self.ids.tolist())}

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj_sets[u]

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array with ``u < v``."""
        src = np.repeat(np.arange(self.n), self.degree)
        mask = src < self.indices
        return np.stack([src[mask], self.indices[mask]], axis=1)

    def bfs(self, sources: Iterable[int], limit: int = -1, blocked: np.ndarray | None = None) -> np.ndarray:
        return _kernels.bfs_dist(self.indptr, self.indices, list(sources), limit, blocked)

    def components(self) -> list[np.ndarray]:
        label = np.full(self.n, -1, dtype=np.int64)
        comps = []
        for v in range(self.n):
            if label[v] < 0:
                members = np.flatnonzero(self.bfs([v]) >= 0)
                label[members] = len(comps)
                comps.append(members)
        return comps


@dataclass(frozen=True, eq=False)
class Subgraph:
    """Induced subgraph of ``host`` on a sorted tuple of vertex indices."""

    host: Graph
    vertices: tuple[int, ...]

    def __post_init__(self):
        vs = tuple(sorted(set(int(v) for v in self.vertices)))
        object.__setattr__(self, "vertices", vs)

    @cached_property
    def vset(self) -> frozenset[int]:
        return frozenset(self.vertices)

    @cached_property
    def adj(self) -> dict[int, tuple[int, ...]]:
        vs = self.vset
        return {v: tuple(u for u in self.host.adj[v] if u in vs) for v in self.vertices}

    def __len__(self) -> int:
        return len(self.vertices)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj.values()) // 2

    def id_key(self) -> tuple[int, ...]:
        ids = self.host.ids
        return tuple(int(ids[v]) for v in self.vertices)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        return len(local_bfs(self.adj, [self.vertices[0]])) == len(self.vertices)

    def induced(self, verts: Iterable[int]) -> "Subgraph":
        verts = set(verts)
        if not verts <= self.vset:
            raise ValueError("not a subset of this subgraph")
        return Subgraph(self.host, tuple(verts))


def subgraph_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Subgraph:
    """Whole graph on ``0..n-1`` wrapped as a subgraph of itself."""
    g = Graph.from_edges(n, edges)
    return Subgraph(g, tuple(range(n)))


# ----------------------------------------------------------------- distances


def local_bfs(adj: Mapping[int, Sequence[int]], sources: Iterable[int], limit: int | None = None,
              avoid: Iterable[int] = ()) -> dict[int, int]:
    """BFS over a dict adjacency; returns ``{vertex: hops}``."""
    banned = set(avoid)
    dist = {}
    frontier = []
    for s in sources:
        if s not in dist:
            dist[s] = 0
            frontier.append(s)
    depth = 0
    while frontier and (limit is None or depth < limit):
        depth += 1
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist and w not in banned:
                    dist[w] = depth
                    nxt.append(w)
        frontier = nxt
    return dist


def local_path(adj: Mapping[int, Sequence[int]], src: int, dst: int, avoid: Iterable[int] = ()) -> list[int] | None:
    """Shortest path with smallest-index predecessors; ``None`` if unreachable."""
    banned = set(avoid)
    parent = {src: -1}
    frontier = [src]
    while frontier and dst not in parent:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in parent and w not in banned:
                    parent[w] = u
                    nxt.append(w)
        frontier = sorted(nxt)
    if dst not in parent:
        return None
    path = [dst]
    while path[-1] != src:
        path.append(parent[path[-1]])
    return path[::-1]


def dist(g: Graph, a: Iterable[int], b: Iterable[int]) -> float:
    """Minimum hop distance between two vertex sets (``inf`` if disconnected)."""
    a = np.unique(np.asarray(list(a), dtype=np.int64))
    b = np.unique(np.asarray(list(b), dtype=np.int64))
    if a.size == 0 or b.size == 0:
        raise ValueError("dist needs nonempty vertex sets")
    d = g.bfs(a)[b]
    d = d[d >= 0]
    return int(d.min()) if d.size else INF


def ball(g: Graph, v: int, r: int) -> Subgraph:
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return Subgraph(g, tuple(np.flatnonzero(g.bfs([v], limit=r) >= 0).tolist()))


def strong_diameter(sub: Subgraph) -> int:
    """Diameter measured inside the induced subgraph (all-pairs BFS)."""
    best = 0
    for v in sub.vertices:
        d = local_bfs(sub.adj, [v])
        if len(d) != len(sub):
            return INF
        best = max(best, max(d.values()))
    return best


# -------------------------------------------------------------------- blocks


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: list[tuple[int, ...]]
    cut_vertices: frozenset[int]
    block_tree: list[tuple[int, int]] = field(default_factory=list)  # (block index, cut vertex)


def _blocks(order: Sequence[int], adj: Mapping[int, Sequence[int]]) -> list[tuple[int, ...]]:
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    blocks: list[tuple[int, ...]] = []
    clock = 0
    for root in order:
        if root in disc:
            continue
        disc[root] = low[root] = clock
        clock += 1
        if not adj[root]:
            blocks.append((root,))
            continue
        stack = [(root, -1, iter(adj[root]))]
        edges: list[tuple[int, int]] = []
        while stack:
            u, parent, it = stack[-1]
            descended = False
            for w in it:
                if w == parent:
                    continue
                if w not in disc:
                    disc[w] = low[w] = clock
                    clock += 1
                    edges.append((u, w))
                    stack.append((w, u, iter(adj[w])))
                    descended = True
                    break
                if disc[w] < disc[u]:
                    low[u] = min(low[u], disc[w])
                    edges.append((u, w))
            if descended:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] >= disc[p]:
                    comp = set()
                    while True:
                        e = edges.pop()
                        comp.update(e)
                        if e == (p, u):
                            break
                    blocks.append(tuple(sorted(comp)))
    return blocks


def _decompose(order: Sequence[int], adj: Mapping[int, Sequence[int]]) -> BlockDecomposition:
    blocks = sorted(_blocks(order, adj))
    count: dict[int, int] = defaultdict(int)
    for b in blocks:
        for v in b:
            count[v] += 1
    cuts = frozenset(v for v, c in count.items() if c >= 2)
    tree = [(i, v) for i, b in enumerate(blocks) for v in b if v in cuts]
    return BlockDecomposition(blocks, cuts, tree)


def block_decomposition(g: Graph | Subgraph) -> BlockDecomposition:
    if isinstance(g, Subgraph):
        return _decompose(g.vertices, g.adj)
    return _decompose(range(g.n), g.adj)


def _is_clique(block: Sequence[int], adj: Mapping[int, Sequence[int]]) -> bool:
    bs = set(block)
    return all(len(bs.intersection(adj[v])) == len(bs) - 1 for v in block)


def _is_cycle(block: Sequence[int], adj: Mapping[int, Sequence[int]]) -> bool:
    bs = set(block)
    return len(block) >= 3 and all(len(bs.intersection(adj[v])) == 2 for v in block)


def is_gallai_tree(sub: Subgraph) -> bool:
    """True iff every block is a clique or an odd cycle."""
    for b in block_decomposition(sub).blocks:
        if _is_clique(b, sub.adj):
            continue
        if _is_cycle(b, sub.adj) and len(b) % 2 == 1:
            continue
        return False
    return True


# ----------------------------------------------------------------- file I/O


def _text_lines(source) -> Iterable[str]:
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode())
    elif isinstance(source, str):
        source = io.StringIO(source)
    for raw in source:
        yield raw.decode() if isinstance(raw, bytes) else raw


def load_graph(source: IO | bytes | str) -> Graph:
    """Parse the edge-list format.

    Line 1 is ``n m [delta]``. Then ``m`` lines ``u v`` with vertex indices
    ``0..n-1``. Optional ``id i X`` lines give vertex ``i`` the ID ``X``.
    Lines starting with ``#`` are comments.
    """
    header = None
    edges: list[tuple[int, int]] = []
    ids: dict[int, int] = {}
    seen: set[tuple[int, int]] = set()
    for lineno, line in enumerate(_text_lines(source), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        tok = text.split()
        try:
            nums = [int(t) for t in tok[1:]] if tok[0] == "id" else [int(t) for t in tok]
        except ValueError:
            raise GraphFormatError(f"line {lineno}: expected integers, got {text!r}") from None
        if header is None:
            if len(nums) not in (2, 3) or tok[0] == "id" or min(nums) < 0:
                raise GraphFormatError(f"line {lineno}: header must be 'n m [delta]'")
            header = nums
            continue
        n = header[0]
        if tok[0] == "id":
            if len(nums) != 2 or not 0 <= nums[0] < n:
                raise GraphFormatError(f"line {lineno}: expected 'id <vertex> <ID>'")
            if nums[0] in ids:
                raise GraphFormatError(f"line {lineno}: vertex {nums[0]} given two IDs")
            ids[nums[0]] = nums[1]
            continue
        if len(nums) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v'")
        u, v = nums
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {lineno}: vertex out of range 0..{n - 1}")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add(key)
        edges.append((u, v))
    if header is None:
        raise GraphFormatError("line 1: missing header")
    n, m = header[0], header[1]
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(edges)}")
    id_list = None
    if ids:
        if len(ids) != n:
            raise GraphFormatError(f"'id' lines cover {len(ids)} of {n} vertices")
        id_list = [ids[i] for i in range(n)]
    try:
        return Graph.from_edges(n, edges, id_list, header[2] if len(header) == 3 else None)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def dump_graph(g: Graph, out: IO[str]) -> None:
    maxdeg = int(g.degree.max()) if g.n else 0
    out.write(f"{g.n} {g.m}" + (f" {g.delta}" if g.delta != maxdeg else "") + "\n")
    if not np.array_equal(g.ids, np.arange(g.n)):
        for i, x in enumerate(g.ids.tolist()):
            out.write(f"id {i} {x}\n")
    for u, v in g.edge_array().tolist():
        out.write(f"{u} {v}\n")


def write_coloring(g: Graph, colors: np.ndarray, out: IO[str]) -> None:
    for x, c in zip(g.ids.tolist(), np.asarray(colors).tolist()):
        out.write(f"{x} {c}\n")


def read_coloring(g: Graph, source) -> np.ndarray:
    """Read ``ID color`` lines; vertices not mentioned stay 0 (uncolored)."""
    colors = np.zeros(g.n, dtype=np.int64)
    for lineno, line in enumerate(_text_lines(source), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        tok = text.split()
        if len(tok) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'v color'")
        try:
            vid, c = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: expected integers") from None
        if vid not in g.index_of:
            raise GraphFormatError(f"line {lineno}: unknown vertex ID {vid}")
        colors[g.index_of[vid]] = c
    return colors


# --------------------------------------------------------------- generators


def _pairing_attempt(n: int, d: int, rng: np.random.Generator) -> set[tuple[int, int]] | None:
    # Pair random stubs; only the offending pairs are redrawn.
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n), d)
    while stubs.size:
        rng.shuffle(stubs)
        leftover: dict[int, int] = defaultdict(int)
        for a, b in stubs.reshape(-1, 2).tolist():
            if a > b:
                a, b = b, a
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                leftover[a] += 1
                leftover[b] += 1
        if not leftover:
            break
        nodes = sorted(leftover)
        if not any((u, v) not in edges for i, u in enumerate(nodes) for v in nodes[i + 1:]):
            return None
        stubs = np.repeat(np.array(nodes), [leftover[v] for v in nodes])
    return edges


def random_regular(n: int, delta: int, seed: int = 0, max_tries: int = 1000) -> Graph:
    if delta < 1 or n * delta % 2 or delta >= n:
        raise InfeasibleParams(f"no simple {delta}-regular graph on {n} vertices")
    if n == delta + 1:
        raise InfeasibleParams("the only candidate is the clique K_{Δ+1}")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        edges = _pairing_attempt(n, delta, rng)
        if edges is None:
            continue
        g = Graph.from_edges(n, sorted(edges))
        if len(g.components()) == 1:
            return g
    raise InfeasibleParams(f"no connected sample after {max_tries} tries")


def torus_grid(rows: int, cols: int) -> Graph:
    if rows < 3 or cols < 3:
        raise InfeasibleParams("torus sides must be at least 3")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            edges.append((v, r * cols + (c + 1) % cols))
            edges.append((v, ((r + 1) % rows) * cols + c))
    return Graph.from_edges(rows * cols, edges)


def tree_of_cliques(cliques: int, delta: int, seed: int = 0) -> Graph:
    """Copies of K_delta joined into a tree by single edges (a Gallai tree)."""
    if cliques < 1 or delta < 2:
        raise InfeasibleParams("need cliques >= 1 and delta >= 2")
    rng = np.random.default_rng(seed)
    edges, free = [], []
    for i in range(cliques):
        base = i * delta
        edges += [(base + a, base + b) for a in range(delta) for b in range(a + 1, delta)]
        if i:
            j = int(rng.integers(len(free)))
            edges.append((free.pop(j), base))
            free += [base + a for a in range(1, delta)]
        else:
            free += [base + a for a in range(delta)]
    return Graph.from_edges(cliques * delta, edges)


def theta_chain(blocks: int, lengths: Sequence[int] = (2, 2, 3)) -> Graph:
    """Theta graphs joined in a path by bridges between degree-2 vertices."""
    if blocks < 1 or len(lengths) != 3 or min(lengths) < 1 or sorted(lengths)[1] < 2:
        raise InfeasibleParams("need three path lengths, at most one equal to 1")
    edges: list[tuple[int, int]] = []
    nxt = 0
    prev_out = None
    inner = [i for i, x in enumerate(lengths) if x >= 2]
    for _ in range(blocks):
        a, b = nxt, nxt + 1
        nxt += 2
        interiors = []
        for length in lengths:
            path = [a] + list(range(nxt, nxt + length - 1)) + [b]
            nxt += length - 1
            edges += list(zip(path, path[1:]))
            interiors.append(path[1:-1])
        port_in, port_out = interiors[inner[0]][0], interiors[inner[-1]][-1]
        if prev_out is not None:
            edges.append((prev_out, port_in))
        prev_out = port_out
    return Graph.from_edges(nxt, edges)


GENERATORS = {
    "random_regular": random_regular,
    "torus_grid": torus_grid,
    "tree_of_cliques": tree_of_cliques,
    "theta_chain": theta_chain,
}


def gen_graph(kind: str, params: Mapping[str, object] | None = None, seed: int = 0) -> Graph:
    params = dict(params or {})
    if kind not in GENERATORS:
        raise InfeasibleParams(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    if kind in ("random_regular", "tree_of_cliques"):
        params.setdefault("seed", seed)
    try:
        return GENERATORS[kind](**params)
    except TypeError as exc:
        raise InfeasibleParams(f"{kind}: {exc}") from None


def parse_gen_spec(text: str) -> tuple[str, dict[str, object]]:
    """``'torus_grid:rows=8,cols=8'`` -> ``('torus_grid', {'rows': 8, 'cols': 8})``."""
    kind, _, rest = text.partition(":")
    params: dict[str, object] = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        if "/" in val:
            params[key] = tuple(int(x) for x in val.split("/"))
        else:
            params[key] = int(val)
    return kind, params

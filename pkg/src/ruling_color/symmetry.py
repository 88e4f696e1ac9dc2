"""Symmetry breaking on the host graph or on a virtual graph.

All routines are written as :class:`SuperstepProgram` subclasses so that the
runtime counts their rounds. Each ``step`` is the vectorised form of a rule
every node applies to its own state and its neighbours' previous state.
"""
from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .runtime import RoundLedger, SuperstepProgram, VirtualGraph, run_on_virtual, run_superstep

#: Palette bound of :func:`linial_coloring`: at most ``LINIAL_C0 * max(Δ, 1)**2`` colors.
LINIAL_C0 = 36
#: Round bound of :func:`linial_coloring`: at most ``LINIAL_C1 * max(log* m, 1)`` rounds, m = max ID + 1.
LINIAL_C1 = 2


@dataclass(frozen=True)
class VertexColoring:
    palette_size: int
    color: np.ndarray  # 1..palette_size per vertex


@dataclass(frozen=True)
class RulingSet:
    members: np.ndarray  # sorted vertex indices
    alpha: int
    beta: int


def _comm(g: Graph | VirtualGraph) -> Graph:
    return g.comm if isinstance(g, VirtualGraph) else g


def _run(g: Graph | VirtualGraph, program: SuperstepProgram, ledger: RoundLedger | None, phase: str):
    if isinstance(g, VirtualGraph):
        return run_on_virtual(g, program, ledger, phase)
    return run_superstep(g, program, ledger, phase)


def _edges(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    return np.repeat(np.arange(g.n), g.degree), g.indices


def _any_neighbor(g: Graph, flag: np.ndarray) -> np.ndarray:
    src, dst = _edges(g)
    out = np.zeros(g.n, dtype=bool)
    np.logical_or.at(out, src, flag[dst])
    return out


# -------------------------------------------------------------------- Linial


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % f for f in range(2, math.isqrt(q) + 1))


def _next_prime(q: int) -> int:
    q = max(q, 2)
    while not _is_prime(q):
        q += 1
    return q


def _iroot_ceil(m: int, k: int) -> int:
    r = max(1, int(round(m ** (1.0 / k))))
    while r**k < m:
        r += 1
    while r > 1 and (r - 1) ** k >= m:
        r -= 1
    return r


def linial_parameters(m: int, delta: int) -> tuple[int, int] | None:
    """Field size q and polynomial degree D for one reduction from m colors.

    Colors become polynomials of degree <= D over GF(q); two of them agree on
    at most D points, so with q > Δ·D every node finds a point where it differs
    from all neighbours. The new palette has q² colors. ``None`` means no D
    shrinks the palette.
    """
    best = None
    for deg in range(1, 64):
        q = _next_prime(max(delta * deg + 1, _iroot_ceil(m, deg + 1)))
        if best is None or q < best[0]:
            best = (q, deg)
        if delta * deg + 1 > m:
            break
    if best is None or best[0] ** 2 >= m:
        return None
    return best


class _LinialProgram(SuperstepProgram):
    def __init__(self, delta: int):
        self.delta = delta

    def init(self, graph):
        m = int(graph.ids.max()) + 1 if graph.n else 1
        return {"color": graph.ids.astype(np.int64), "m": m, "plan": linial_parameters(m, self.delta)}

    def halted(self, graph, state, rnd):
        return state["plan"] is None

    def step(self, graph, state, rnd):
        q, deg = state["plan"]
        x = state["color"]
        cols, rest = [], x.copy()
        for _ in range(deg + 1):
            cols.append(rest % q)
            rest //= q
        digits = np.stack(cols, axis=1)
        pts = np.arange(q, dtype=np.int64)
        vals = np.zeros((graph.n, q), dtype=np.int64)
        for j in range(deg, -1, -1):
            vals = (vals * pts + digits[:, j:j + 1]) % q
        src, dst = _edges(graph)
        clash = np.zeros((graph.n, q), dtype=bool)
        np.logical_or.at(clash, src, vals[src] == vals[dst])
        a = np.argmin(clash, axis=1)
        assert not clash[np.arange(graph.n), a].any(), "Linial step found no free point"
        new = a * q + vals[np.arange(graph.n), a]
        m = q * q
        return {"color": new, "m": m, "plan": linial_parameters(m, self.delta)}


def linial_coloring(g: Graph | VirtualGraph, ledger: RoundLedger | None, phase: str = "linial") -> VertexColoring:
    """Proper coloring with O(Δ²) colors in O(log* n) rounds, starting from IDs."""
    comm = _comm(g)
    if comm.n == 0:
        return VertexColoring(1, np.zeros(0, dtype=np.int64))
    if comm.m == 0:
        _run(g, _Immediate(), ledger, phase)
        return VertexColoring(1, np.ones(comm.n, dtype=np.int64))
    delta = int(comm.degree.max())
    state = _run(g, _LinialProgram(delta), ledger, phase)
    return VertexColoring(int(state["m"]), state["color"] + 1)


class _Immediate(SuperstepProgram):
    def init(self, graph):
        return None

    def halted(self, graph, state, rnd):
        return True


# -------------------------------------------------------------- ruling sets


def _base(d: int, c: int) -> int:
    b = 1
    while b**c < d:
        b += 1
    return b


class _RulingProgram(SuperstepProgram):
    """One round per (level, digit) pair; see :func:`ruling_set_from_coloring`."""

    def __init__(self, color: np.ndarray, palette: int, c: int):
        self.c = c
        self.base = _base(palette, c)
        self.x = np.asarray(color, dtype=np.int64) - 1

    def init(self, graph):
        return {"cand": np.ones(graph.n, dtype=bool), "chosen": np.zeros(graph.n, dtype=bool)}

    def halted(self, graph, state, rnd):
        return rnd >= self.c * self.base

    def step(self, graph, state, rnd):
        level, digit = divmod(rnd - 1, self.base)
        b = self.base
        group = self.x // b ** (level + 1)
        mine = (self.x // b**level) % b
        src, dst = _edges(graph)
        chosen = state["chosen"]
        blocked = np.zeros(graph.n, dtype=bool)
        np.logical_or.at(blocked, src, chosen[dst] & (group[src] == group[dst]))
        join = state["cand"] & (mine == digit) & ~blocked
        chosen = chosen | join
        if digit == b - 1:
            return {"cand": chosen, "chosen": np.zeros(graph.n, dtype=bool)}
        return {"cand": state["cand"], "chosen": chosen}


def ruling_set_from_coloring(g: Graph | VirtualGraph, coloring: VertexColoring, c: int,
                             ledger: RoundLedger | None, phase: str = "ruling_set") -> RulingSet:
    """(2, c)-ruling set in c·⌈d^(1/c)⌉ rounds from a proper d-coloring.

    Write colors in base B = ⌈d^(1/c)⌉. Level j merges the sets found for
    groups that agree on digits >= j: digit classes 0..B-1 of digit j-1 join
    one per round unless a same-group neighbour has already joined. Each level
    adds at most one hop of domination distance.
    """
    if c < 1:
        raise ValueError("c must be at least 1")
    comm = _comm(g)
    prog = _RulingProgram(coloring.color, coloring.palette_size, c)
    state = _run(g, prog, ledger, phase)
    members = np.flatnonzero(state["cand"]) if comm.n else np.zeros(0, dtype=np.int64)
    return RulingSet(members, 2, c)


class _MISProgram(SuperstepProgram):
    def __init__(self, color: np.ndarray, palette: int):
        self.color = np.asarray(color)
        self.palette = palette

    def init(self, graph):
        return np.zeros(graph.n, dtype=bool)

    def halted(self, graph, state, rnd):
        return rnd >= self.palette

    def step(self, graph, state, rnd):
        join = (self.color == rnd) & ~_any_neighbor(graph, state)
        return state | join


def mis_from_coloring(g: Graph | VirtualGraph, coloring: VertexColoring, ledger: RoundLedger | None,
                      phase: str = "mis") -> np.ndarray:
    """Maximal independent set: color classes join in turn, one per round."""
    if _comm(g).n == 0:
        return np.zeros(0, dtype=np.int64)
    state = _run(g, _MISProgram(coloring.color, coloring.palette_size), ledger, phase)
    return np.flatnonzero(state)


# --------------------------------------------------------------- randomness


def uniform(seed: int, phase: str, vertex_ids: np.ndarray, counter: int = 0) -> np.ndarray:
    """Per-vertex uniforms in [0, 1) from a hash of (seed, phase, counter, ID)."""
    tag = phase.encode()
    out = np.empty(len(vertex_ids), dtype=np.float64)
    for i, vid in enumerate(np.asarray(vertex_ids).tolist()):
        h = hashlib.blake2b(struct.pack("<qq", seed, counter) + tag + struct.pack("<q", vid), digest_size=8)
        out[i] = int.from_bytes(h.digest(), "little") / 2.0**64
    return out


class _SamplingProgram(SuperstepProgram):
    def __init__(self, seed: int, iterations: int, delta: int, phase: str):
        self.seed, self.iterations, self.delta, self.phase = seed, iterations, max(delta, 1), phase

    def init(self, graph):
        return {"active": np.ones(graph.n, dtype=bool), "marked": np.zeros(graph.n, dtype=bool)}

    def halted(self, graph, state, rnd):
        return rnd >= self.iterations or not state["active"].any()

    def step(self, graph, state, rnd):
        p = min(1.0, 2.0**rnd / self.delta)
        pick = state["active"] & (uniform(self.seed, self.phase, graph.ids, rnd) < p)
        marked = state["marked"] | pick
        active = state["active"] & ~pick & ~_any_neighbor(graph, pick)
        return {"active": active, "marked": marked}


def randomized_ruling_set(g: Graph | VirtualGraph, seed: int, ledger: RoundLedger | None,
                          phase: str = "rand_ruling") -> RulingSet:
    """(2, β)-ruling set: random sampling, then a deterministic ruling set.

    For ⌈log log n⌉ rounds, active vertices sample themselves with probability
    2^i/Δ in round i; samples and their neighbours go inactive. Samples plus the
    leftover active vertices form U, on which a (2, ⌈log log n⌉)-ruling set is
    computed from a Linial coloring. Every vertex is within one hop of U, so
    β = ⌈log log n⌉ + 1.
    """
    comm = _comm(g)
    n = comm.n
    if n == 0:
        return RulingSet(np.zeros(0, dtype=np.int64), 2, 1)
    loglog = max(1, math.ceil(math.log2(max(2.0, math.log2(max(n, 2))))))
    delta = int(comm.degree.max()) if n else 0
    state = _run(g, _SamplingProgram(seed, loglog, delta, phase), ledger, f"{phase}/sample")
    keep = np.flatnonzero(state["marked"] | state["active"])
    rest = _restrict(g, keep)
    col = linial_coloring(rest, ledger, f"{phase}/linial")
    rs = ruling_set_from_coloring(rest, col, loglog, ledger, f"{phase}/fallback")
    return RulingSet(np.sort(keep[rs.members]), 2, loglog + 1)


def _restrict(g: Graph | VirtualGraph, keep: np.ndarray) -> Graph | VirtualGraph:
    comm = _comm(g)
    pos = np.full(comm.n, -1, dtype=np.int64)
    pos[keep] = np.arange(keep.size)
    e = comm.edge_array()
    e = e[(pos[e[:, 0]] >= 0) & (pos[e[:, 1]] >= 0)]
    if isinstance(g, VirtualGraph):
        return VirtualGraph(tuple(g.members[i] for i in keep.tolist()), pos[e], g.dilation,
                            g.representative[keep], g.host)
    return Graph.from_edges(keep.size, pos[e].tolist(), comm.ids[keep])


def check_ruling_set(g: Graph, members: np.ndarray, alpha: int, beta: int) -> tuple[bool, str]:
    """Exhaustive BFS check of separation >= alpha and domination <= beta."""
    members = np.asarray(members, dtype=np.int64)
    if g.n and members.size == 0:
        return False, "empty ruling set"
    for v in members.tolist():
        d = g.bfs([v], limit=alpha - 1)
        close = [u for u in members.tolist() if u != v and d[u] >= 0]
        if close:
            return False, f"members {int(g.ids[v])} and {int(g.ids[close[0]])} closer than {alpha}"
    d = g.bfs(members)
    far = np.flatnonzero((d < 0) | (d > beta))
    if far.size:
        return False, f"vertex {int(g.ids[far[0]])} farther than {beta} from the set"
    return True, "ok"

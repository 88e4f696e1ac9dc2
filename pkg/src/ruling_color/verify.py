"""Independent checks and brute-force oracles.

Nothing here trusts the pipeline's own bookkeeping: properness is checked edge
by edge, ruling families by fresh BFS, and colorability by exhaustive search.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, Subgraph
from .ruling import Orchid


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    witness: str = ""


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool, witness: str = "") -> None:
        if not ok and not witness:
            raise ValueError("a failing check needs a witness")
        self.checks.append(Check(name, bool(ok), witness))

    @property
    def summary(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[str]:
        return [f"{c.name}: {c.witness}" for c in self.checks if not c.ok]

    def as_dict(self) -> dict:
        return {"summary": self.summary,
                "checks": [{"name": c.name, "ok": c.ok, "witness": c.witness} for c in self.checks]}


def verify_proper_coloring(g: Graph, coloring, palette_cap: int) -> VerificationReport:
    col = np.asarray(coloring, dtype=np.int64)
    rep = VerificationReport()
    if col.shape != (g.n,):
        rep.add("shape", False, f"expected {g.n} colors, got {col.shape}")
        return rep
    blank = np.flatnonzero(col <= 0)
    rep.add("total", blank.size == 0, f"vertex {int(g.ids[blank[0]])} uncolored" if blank.size else "")
    over = np.flatnonzero(col > palette_cap)
    rep.add("palette", over.size == 0,
            f"vertex {int(g.ids[over[0]])} has color {int(col[over[0]])} > {palette_cap}" if over.size else "")
    e = g.edge_array()
    bad = e[(col[e[:, 0]] == col[e[:, 1]]) & (col[e[:, 0]] > 0)]
    rep.add("proper", bad.shape[0] == 0,
            f"edge {int(g.ids[bad[0, 0]])}-{int(g.ids[bad[0, 1]])} both colored {int(col[bad[0, 0]])}"
            if bad.shape[0] else "")
    return rep


def verify_brooks_preconditions(g: Graph) -> VerificationReport:
    rep = VerificationReport()
    delta = g.delta
    rep.add("delta_at_least_3", delta >= 3, f"Δ = {delta}")
    witness = ""
    for comp in g.components():
        if comp.size != delta + 1:
            continue
        cs = set(comp.tolist())
        if all(len(g.adj_sets[v] & cs) == delta for v in comp.tolist()):
            witness = "component {" + ",".join(str(int(g.ids[v])) for v in comp.tolist()) + f"}} is K_{delta + 1}"
            break
    rep.add("no_clique_component", not witness, witness)
    return rep


def verify_ruling_family(g: Graph, input_family: Sequence[Orchid], output_family: Sequence[Orchid], d: int,
                         coverage_bound: int | None = None) -> tuple[VerificationReport, int]:
    """Checks the output contract of a ruling family run; also returns the coverage radius."""
    rep = VerificationReport()
    witness = ""
    for a, ha in enumerate(output_family):
        va = set(ha.sub.vertices)
        for b, hb in enumerate(output_family):
            if a != b and va & hb.halo_set:
                witness = f"member {a} meets the orchid of member {b}"
                break
        if witness:
            break
    rep.add("contention_empty", not witness, witness)

    witness = ""
    for b, hb in enumerate(output_family):
        near = g.bfs(hb.stem, limit=d) >= 0
        for a, ha in enumerate(output_family):
            if a != b and near[list(ha.sub.vertices)].any():
                witness = f"member {a} within distance {d} of the stem of member {b}"
                break
        if witness:
            break
    rep.add("stem_separation", not witness, witness)

    radius = -1
    if input_family:
        if output_family:
            src = sorted({v for h in output_family for v in h.sub.vertices})
            dist = g.bfs(src)
            radius = 0
            for i, h in enumerate(input_family):
                dv = dist[list(h.sub.vertices)]
                dv = dv[dv >= 0]
                if dv.size == 0:
                    radius = -1
                    rep.add("coverage_finite", False, f"input member {i} cannot reach the output")
                    break
                radius = max(radius, int(dv.min()))
        else:
            rep.add("coverage_finite", False, "output family is empty")
    else:
        radius = 0
    if radius >= 0 and coverage_bound is not None:
        rep.add("coverage_bound", radius <= coverage_bound, f"coverage {radius} > bound {coverage_bound}")
    return rep, radius


def verify_degree_bounds(snapshots: Iterable[dict]) -> VerificationReport:
    rep = VerificationReport()
    for snap in snapshots:
        for c in snap["checks"]:
            ok = c["measured"] <= c["bound"] + 1e-9
            rep.add(f"{snap['stage']}:{c['name']}", ok, f"measured {c['measured']} > bound {c['bound']}")
    return rep


# ------------------------------------------------------------------ oracles


def _as_adj(g: Graph | Subgraph) -> tuple[list[int], dict[int, tuple[int, ...]]]:
    if isinstance(g, Subgraph):
        return list(g.vertices), dict(g.adj)
    return list(range(g.n)), {v: g.adj[v] for v in range(g.n)}


def exhaustive_delta_colorable(g: Graph, cap: int = 12) -> bool:
    """Backtracking search for a proper coloring with colors 1..Δ."""
    if g.n > cap:
        raise ValueError(f"graph has {g.n} vertices, oracle cap is {cap}")
    k = g.delta
    col = [0] * g.n

    def pick() -> int:
        best, key = -1, None
        for v in range(g.n):
            if col[v]:
                continue
            sat = len({col[w] for w in g.adj[v] if col[w]})
            cand = (sat, g.degree[v])
            if key is None or cand > key:
                best, key = v, cand
        return best

    def go(left: int) -> bool:
        if left == 0:
            return True
        v = pick()
        used = {col[w] for w in g.adj[v]}
        for c in range(1, k + 1):
            if c not in used:
                col[v] = c
                if go(left - 1):
                    return True
        col[v] = 0
        return False

    return k >= 1 and go(g.n) if g.n else True


def _list_colorable(order: list[int], adj, lists: dict[int, tuple[int, ...]]) -> bool:
    col: dict[int, int] = {}

    def go(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        used = {col[w] for w in adj[v] if w in col}
        for c in lists[v]:
            if c not in used:
                col[v] = c
                if go(i + 1):
                    return True
                del col[v]
        return False

    return go(0)


def _canonical_lists(sizes: list[int], palette: int):
    """Every assignment of lists of the given sizes, up to renaming colors.

    Colors appear in first-use order, so each orbit of the symmetric group on
    the palette is produced exactly once.
    """
    out: list[tuple[int, ...]] = []

    def go(i: int, used: int):
        if i == len(sizes):
            yield tuple(out)
            return
        s = sizes[i]
        for fresh in range(0, min(s, palette - used) + 1):
            old = s - fresh
            if old > used:
                continue
            new = tuple(range(used + 1, used + fresh + 1))
            for keep in combinations(range(1, used + 1), old):
                out.append(keep + new)
                yield from go(i + 1, used + fresh)
                out.pop()

    yield from go(0, 0)


def brute_force_list_choosable(sub: Graph | Subgraph, max_palette: int = 6) -> bool:
    """True iff every assignment of degree-sized lists from [max_palette] admits a proper list coloring."""
    verts, adj = _as_adj(sub)
    if len(verts) > 6 or max_palette > 6:
        raise ValueError("oracle limited to 6 vertices and 6 colors")
    sizes = [len(adj[v]) for v in verts]
    if any(s > max_palette for s in sizes):
        raise ValueError("a degree exceeds the palette")
    order = sorted(range(len(verts)), key=lambda i: -sizes[i])
    local_adj = {i: [verts.index(w) for w in adj[verts[i]]] for i in range(len(verts))}
    for lists in _canonical_lists(sizes, max_palette):
        if not _list_colorable(order, local_adj, dict(enumerate(lists))):
            return False
    return True

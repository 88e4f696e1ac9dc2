"""Synchronous round engine and the ledger that charges LOCAL rounds.

There are three ways a phase pays for rounds:

* ``superstep``: a program is stepped on the host graph; one superstep is one
  round.
* ``ball_collect``: every node inspects its radius-r ball; costs r rounds.
* ``virtual``: a program runs on a graph whose vertices are subgraphs; every
  virtual round costs ``dilation`` host rounds.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from .graph import Graph

DEFAULT_ROUND_CAP = 10**7
MODES = ("superstep", "ball_collect", "virtual")


def round_cap() -> int:
    return int(os.environ.get("RULING_COLOR_ROUND_CAP", DEFAULT_ROUND_CAP))


class RoundCapExceeded(RuntimeError):
    def __init__(self, phase: str, cap: int):
        super().__init__(f"phase {phase!r} exceeded the round cap of {cap}")
        self.phase = phase


@dataclass(frozen=True)
class LedgerEntry:
    phase: str
    mode: str
    native_rounds: int
    dilation: int
    charged_rounds: int


@dataclass
class RoundLedger:
    entries: list[LedgerEntry] = field(default_factory=list)

    def record(self, phase: str, mode: str, native_rounds: int, dilation: int = 1) -> LedgerEntry:
        if mode not in MODES:
            raise ValueError(f"unknown ledger mode {mode!r}")
        if native_rounds < 0:
            raise ValueError("negative round count")
        if mode != "virtual":
            dilation = 1
        if dilation < 1:
            raise ValueError("dilation must be positive")
        entry = LedgerEntry(phase, mode, int(native_rounds), int(dilation), int(native_rounds) * int(dilation))
        self.entries.append(entry)
        return entry

    def total(self) -> int:
        return sum(e.charged_rounds for e in self.entries)

    def by_prefix(self) -> dict[str, int]:
        """Charged rounds grouped by the text before the first ``/`` of each phase."""
        out: dict[str, int] = {}
        for e in self.entries:
            key = e.phase.split("/", 1)[0]
            out[key] = out.get(key, 0) + e.charged_rounds
        return out

    def as_dicts(self) -> list[dict[str, Any]]:
        return [asdict(e) for e in self.entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["phase", "mode", "native_rounds", "dilation", "charged_rounds"])
        for e in self.entries:
            w.writerow([e.phase, e.mode, e.native_rounds, e.dilation, e.charged_rounds])
        return buf.getvalue()


# ------------------------------------------------------------------ programs


class SuperstepProgram:
    """Whole-graph synchronous program.

    ``step`` must compute round ``r`` from the state after round ``r-1`` as if
    every node acted at once; implementations are vectorised versions of a
    per-node rule and must not depend on evaluation order.
    """

    def init(self, graph: Graph) -> Any:
        raise NotImplementedError

    def step(self, graph: Graph, state: Any, rnd: int) -> Any:
        raise NotImplementedError

    def halted(self, graph: Graph, state: Any, rnd: int) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class NodeView:
    id: int
    neighbor_ids: tuple[int, ...]
    seed: int


class NodeProgram(SuperstepProgram):
    """Per-node message passing. Each round every node sends, then receives.

    ``send`` returns either ``None``, one message for all neighbours, or a dict
    from neighbour ID to message. Inboxes are sorted by sender ID.
    """

    broadcast = True

    def init_node(self, node: NodeView) -> Any:
        raise NotImplementedError

    def send(self, node: NodeView, state: Any, rnd: int) -> Any:
        raise NotImplementedError

    def receive(self, node: NodeView, state: Any, inbox: list[tuple[int, Any]], rnd: int) -> Any:
        raise NotImplementedError

    def node_halted(self, node: NodeView, state: Any) -> bool:
        raise NotImplementedError

    def __init__(self, seed: int = 0):
        self.seed = seed

    def _views(self, graph: Graph) -> list[NodeView]:
        ids = graph.ids.tolist()
        return [NodeView(ids[v], tuple(ids[u] for u in graph.adj[v]), self.seed) for v in range(graph.n)]

    def init(self, graph: Graph) -> list[Any]:
        self._cache = self._views(graph)
        return [self.init_node(view) for view in self._cache]

    def step(self, graph: Graph, state: list[Any], rnd: int) -> list[Any]:
        views = self._cache
        index_of = graph.index_of
        inbox: list[list[tuple[int, Any]]] = [[] for _ in range(graph.n)]
        for v in range(graph.n):
            out = self.send(views[v], state[v], rnd)
            if out is None:
                continue
            if isinstance(out, dict):
                for target, msg in out.items():
                    inbox[index_of[target]].append((views[v].id, msg))
            else:
                for u in graph.adj[v]:
                    inbox[u].append((views[v].id, out))
        return [self.receive(views[v], state[v], sorted(inbox[v], key=lambda x: x[0]), rnd)
                for v in range(graph.n)]

    def halted(self, graph: Graph, state: list[Any], rnd: int) -> bool:
        return all(self.node_halted(self._cache[v], state[v]) for v in range(graph.n))


def run_superstep(graph: Graph, program: SuperstepProgram, ledger: RoundLedger | None, phase: str,
                  cap: int | None = None) -> Any:
    """Step ``program`` until it halts; charges one round per superstep."""
    cap = round_cap() if cap is None else cap
    state = program.init(graph)
    rnd = 0
    while not program.halted(graph, state, rnd):
        if rnd >= cap:
            raise RoundCapExceeded(phase, cap)
        rnd += 1
        state = program.step(graph, state, rnd)
    if ledger is not None:
        ledger.record(phase, "superstep", rnd)
    program.rounds = rnd
    return state


def charge_ball(ledger: RoundLedger, phase: str, radius: int) -> LedgerEntry:
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return ledger.record(phase, "ball_collect", int(radius))


# ------------------------------------------------------------ virtual graphs


@dataclass(frozen=True, eq=False)
class VirtualGraph:
    """Graph over family members, simulated on the host with a fixed dilation."""

    members: tuple[int, ...]
    edges: np.ndarray
    dilation: int
    representative: np.ndarray
    host: Graph
    directed: bool = False

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "representative", np.asarray(self.representative, dtype=np.int64))
        if self.dilation < 1:
            raise ValueError("dilation must be positive")
        rep_ids = self.host.ids[self.representative] if self.representative.size else self.representative
        if np.any(np.diff(rep_ids) < 0):
            raise ValueError("members must be listed in nondecreasing representative-ID order")

    @property
    def size(self) -> int:
        return len(self.members)

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 0], minlength=self.size) if self.edges.size else np.zeros(self.size, int)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 1], minlength=self.size) if self.edges.size else np.zeros(self.size, int)

    def undirected_edges(self) -> np.ndarray:
        if not self.edges.size:
            return self.edges
        e = np.sort(self.edges, axis=1)
        e = e[e[:, 0] != e[:, 1]]
        return np.unique(e, axis=0)

    def max_degree(self) -> int:
        e = self.undirected_edges()
        if not e.size:
            return 0
        return int(np.bincount(e.ravel(), minlength=self.size).max())

    @cached_property
    def comm(self) -> Graph:
        """Undirected communication graph on member positions.

        Vertex IDs are the representatives' IDs when those are distinct and
        the positions themselves otherwise; either way position order is ID
        order, so state arrays line up with ``members``.
        """
        rep_ids = self.host.ids[self.representative]
        ids = rep_ids if np.all(np.diff(rep_ids) > 0) else np.arange(self.size)
        return Graph.from_edges(self.size, self.undirected_edges().tolist(), ids)

    def dilation_ok(self) -> bool:
        """Every edge's representatives lie within ``dilation`` host hops."""
        for a, b in self.undirected_edges().tolist():
            d = self.host.bfs([int(self.representative[a])], limit=self.dilation)
            if d[int(self.representative[b])] < 0:
                return False
        return True


def run_on_virtual(vg: VirtualGraph, program: SuperstepProgram, ledger: RoundLedger | None, phase: str,
                   cap: int | None = None) -> Any:
    g = vg.comm
    scratch = RoundLedger()
    state = run_superstep(g, program, scratch, phase, cap)
    if ledger is not None:
        ledger.record(phase, "virtual", scratch.entries[-1].native_rounds, vg.dilation)
    return state


def log_star(x: float) -> int:
    """Iterated base-2 logarithm: applications of log2 until the value is at most 1."""
    count = 0
    while x > 1:
        x = np.log2(x)
        count += 1
    return count


def ceil_log(x: float, base: float) -> int:
    """``ceil(log_base(x))`` with exact integer powers handled without float drift."""
    if base <= 1:
        raise ValueError("logarithm base must exceed 1")
    if x <= 1:
        return 0
    k = 0
    p = 1
    while p < x:
        p *= base
        k += 1
    return k

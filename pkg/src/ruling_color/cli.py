"""Command-line harness: generate graphs, run both pipelines, verify, sweep."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .coloring import BrooksViolation, ColoringFailure, ListDeficit, delta_color_deterministic
from .graph import (Graph, GraphFormatError, InfeasibleParams, Subgraph, dump_graph, gen_graph, load_graph,
                    parse_gen_spec, read_coloring, write_coloring)
from .randomized import RandConfig, delta_color_randomized
from .ruling import Orchid, ruling_subgraphs
from .runtime import RoundCapExceeded, RoundLedger
from .structures import NldecSearch
from .verify import verify_proper_coloring, verify_ruling_family

FAILURES = (BrooksViolation, ColoringFailure, ListDeficit, RoundCapExceeded, InfeasibleParams, GraphFormatError)


@dataclass
class RunConfig:
    pipeline: str
    graph: str | None = None
    gen: str | None = None
    seed: int = 0
    b: int | None = None
    p_exp: float | None = None
    d: int | None = None
    max_retries: int | None = None
    paper_constants: bool = False
    out: str | None = None
    report: str | None = None

    def rand_config(self) -> RandConfig:
        base = RandConfig()
        return RandConfig(
            b=base.b if self.b is None else self.b,
            p_exp=base.p_exp if self.p_exp is None else self.p_exp,
            d=self.d,
            max_retries=base.max_retries if self.max_retries is None else self.max_retries,
            paper_constants=self.paper_constants,
        )


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load(args) -> Graph:
    if getattr(args, "graph", None):
        with open(args.graph) as fh:
            return load_graph(fh)
    if getattr(args, "gen", None):
        kind, params = parse_gen_spec(args.gen)
        return gen_graph(kind, params, args.seed)
    raise SystemExit("error: give --graph FILE or --gen kind:params")


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


# ------------------------------------------------------------------ commands


def cmd_generate(args) -> int:
    try:
        g = _load(args)
    except InfeasibleParams as exc:
        return _fail(str(exc))
    buf = io.StringIO()
    dump_graph(g, buf)
    _write(args.out, buf.getvalue())
    return 0


def _run(args, pipeline: str) -> int:
    cfg = RunConfig(pipeline, args.graph, args.gen, args.seed, getattr(args, "b", None), getattr(args, "p_exp", None),
                    getattr(args, "d", None), getattr(args, "max_retries", None),
                    getattr(args, "paper_constants", False), args.out, args.report)
    ledger = RoundLedger()
    try:
        g = _load(args)
        if pipeline == "det":
            coloring = delta_color_deterministic(g, ledger)
        else:
            coloring = delta_color_randomized(g, args.seed, cfg.rand_config(), ledger)
    except FAILURES as exc:
        return _fail(str(exc))
    rep = verify_proper_coloring(g, coloring.col, g.delta)
    if args.out:
        buf = io.StringIO()
        write_coloring(g, coloring.col, buf)
        _write(args.out, buf.getvalue())
    report = {
        "config": asdict(cfg),
        "n": g.n, "m": g.m, "delta": g.delta,
        "total_rounds": ledger.total(),
        "phases": ledger.by_prefix(),
        "ledger": ledger.as_dicts(),
        "info": coloring.info,
        "verification": rep.as_dict(),
    }
    if args.report or not args.out:
        _write(args.report or "-", dumps(report))
    if not rep.summary:
        return _fail("; ".join(rep.failures()))
    return 0


def cmd_run_det(args) -> int:
    return _run(args, "det")


def cmd_run_rand(args) -> int:
    return _run(args, "rand")


def cmd_verify(args) -> int:
    try:
        g = _load(args)
        with open(args.coloring) as fh:
            col = read_coloring(g, fh)
    except (GraphFormatError, InfeasibleParams) as exc:
        return _fail(str(exc))
    rep = verify_proper_coloring(g, col, args.palette or g.delta)
    _write(args.report or "-", dumps(rep.as_dict()))
    return 0 if rep.summary else 1


def bench_cell(pipeline: str, n: int, delta: int, seed: int, rand: RandConfig | None = None) -> dict:
    g = gen_graph("random_regular", {"n": n, "delta": delta}, seed)
    ledger = RoundLedger()
    row = {"n": n, "delta": delta, "seed": seed}
    try:
        if pipeline == "det":
            c = delta_color_deterministic(g, ledger)
        else:
            c = delta_color_randomized(g, seed, rand, ledger)
    except FAILURES as exc:
        row.update(total_rounds=ledger.total(), phase_breakdown="", coverage_radius="", h_layers="",
                   verified=False, error=str(exc))
        return row
    ok = verify_proper_coloring(g, c.col, g.delta).summary
    row.update(
        total_rounds=ledger.total(),
        phase_breakdown=";".join(f"{k}={v}" for k, v in ledger.by_prefix().items()),
        coverage_radius=c.info.get("coverage_radius", ""),
        h_layers=c.info.get("h_layers", ""),
        verified=ok,
    )
    return row


BENCH_COLUMNS = ["n", "delta", "seed", "total_rounds", "phase_breakdown", "coverage_radius", "h_layers", "verified"]


def cmd_bench(args) -> int:
    rand = RandConfig(args.b, args.p_exp, args.d, args.max_retries, args.paper_constants) \
        if args.pipeline == "rand" else None
    cells = [(args.pipeline, n, dl, s, rand) for n in args.n for dl in args.delta for s in range(args.seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(bench_cell, *zip(*cells)))
    else:
        rows = [bench_cell(*c) for c in cells]
    buf = io.StringIO()
    w = csv.DictWriter(buf, BENCH_COLUMNS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _write(args.csv or "-", buf.getvalue())
    for r in rows:
        if "error" in r:
            print(f"n={r['n']} delta={r['delta']} seed={r['seed']}: {r['error']}", file=sys.stderr)
    return 0 if all(r["verified"] for r in rows) else 1


def read_family(g: Graph, text: str) -> list[tuple[list[int], list[int], int]]:
    """Lines ``v1 v2 ... | s1 s2 ... | root`` in vertex IDs; ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("|")
        if len(parts) != 3:
            raise GraphFormatError(f"family line {lineno}: expected 'vertices | stem | root'")
        try:
            verts, stem, root = ([g.index_of[int(x)] for x in p.replace(",", " ").split()] for p in parts)
        except KeyError as exc:
            raise GraphFormatError(f"family line {lineno}: unknown vertex ID {exc.args[0]}") from None
        except ValueError:
            raise GraphFormatError(f"family line {lineno}: expected integers") from None
        if len(root) != 1:
            raise GraphFormatError(f"family line {lineno}: exactly one root")
        out.append((verts, stem, root[0]))
    return out


def cmd_ruling_subgraphs(args) -> int:
    try:
        g = _load(args)
        spec = read_family(g, Path(args.family).read_text())
        family = [Orchid.build(Subgraph(g, tuple(v)), r, tuple(s), args.d, args.t) for v, s, r in spec]
    except (GraphFormatError, InfeasibleParams, ValueError) as exc:
        return _fail(str(exc))
    if not family:
        return _fail("family file is empty")
    k = args.k or max(len(o.sub) for o in family)
    t = max(o.t for o in family)
    ledger = RoundLedger()
    try:
        result = ruling_subgraphs(family, k, t, args.d, ledger)
    except (ValueError, RoundCapExceeded) as exc:
        return _fail(str(exc))
    out = [family[i] for i in result.selected]
    rep, radius = verify_ruling_family(g, family, out, args.d, result.coverage_bound)
    ids = g.ids
    report = {
        "selected": [int(i) for i in result.selected],
        "survivors": [{"vertices": [int(ids[v]) for v in o.sub.vertices], "stem": [int(ids[v]) for v in o.stem],
                       "root": int(ids[o.root])} for o in out],
        "metrics": result.metrics(),
        "verified_coverage_radius": radius,
        "verification": rep.as_dict(),
        "total_rounds": ledger.total(),
        "ledger": ledger.as_dicts(),
    }
    _write(args.report or "-", dumps(report))
    return 0 if rep.summary else 1


def cmd_find_nldcc(args) -> int:
    try:
        g = _load(args)
    except (GraphFormatError, InfeasibleParams) as exc:
        return _fail(str(exc))
    targets = None
    if args.vertex is not None:
        if args.vertex not in g.index_of:
            return _fail(f"unknown vertex ID {args.vertex}")
        targets = [g.index_of[args.vertex]]
    picks = NldecSearch(g, args.radius).select(targets)
    ids = g.ids
    rows = []
    for v, c in sorted(picks.items()):
        rows.append({"vertex": int(ids[v]), "found": c is not None} | ({} if c is None else {
            "kind": c.kind, "vertices": list(c.sub.id_key()), "root": int(ids[c.root]),
            "stem": [int(ids[x]) for x in c.stem]}))
    _write(args.report or "-", dumps({"radius": args.radius, "structures": rows}))
    return 0 if all(r["found"] for r in rows) else 1


# ------------------------------------------------------------------ parser


def _graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--gen", help="generator spec kind:key=val,... e.g. torus_grid:rows=8,cols=8")
    p.add_argument("--seed", type=int, default=0)


def _rand_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--b", type=int, default=RandConfig.b, help="T-node conflict distance")
    p.add_argument("--p-exp", type=float, default=RandConfig.p_exp, help="selection probability is Δ^-p_exp")
    p.add_argument("--d", type=int, default=None, help="override the structure radius parameter")
    p.add_argument("--max-retries", type=int, default=RandConfig.max_retries)
    p.add_argument("--paper-constants", action="store_true", help="b=34, p=Δ^-34")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ruling-color", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated graph")
    _graph_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    for name, func, rand in (("run-det", cmd_run_det, False), ("run-rand", cmd_run_rand, True)):
        p = sub.add_parser(name, help=f"{'randomized' if rand else 'deterministic'} Δ-coloring")
        _graph_flags(p)
        if rand:
            _rand_flags(p)
        p.add_argument("--out", help="coloring file (ID color per line)")
        p.add_argument("--report", help="JSON report")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="check a coloring file")
    _graph_flags(p)
    p.add_argument("--coloring", required=True)
    p.add_argument("--palette", type=int, default=None, help="palette cap (default Δ)")
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="sweep random regular graphs and emit CSV")
    p.add_argument("--pipeline", choices=("det", "rand"), default="det")
    p.add_argument("--n", type=int, nargs="+", default=[2**10, 2**12])
    p.add_argument("--delta", type=int, nargs="+", default=[3])
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv")
    _rand_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ruling-subgraphs", help="ruling family of a given subgraph family")
    _graph_flags(p)
    p.add_argument("--family", required=True, help="lines 'vertices | stem | root' in vertex IDs")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--report")
    p.set_defaults(func=cmd_ruling_subgraphs)

    p = sub.add_parser("find-nldcc", help="smallest structure near each vertex")
    _graph_flags(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--vertex", type=int, default=None, help="only this vertex ID")
    p.add_argument("--report")
    p.set_defaults(func=cmd_find_nldcc)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Graph families, the built-in corpus and the deterministic corpus runner."""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Callable, Sequence

from . import __version__
from .algebra import L
from .characters import ball_dimension
from .fock import TruncatedFock, build_truncated_rep, norm_estimate, verify_relations
from .graph import DirectedGraph, GraphError, graph_from_obj, load_graph
from .nestrep import EdgeCountMismatch, edge_count_via_radical
from .reconstruct import verify_roundtrip

__all__ = [
    "loops_graph",
    "parallel_graph",
    "cycle2_graph",
    "cycle_graph",
    "chain_graph",
    "disjoint_union",
    "family",
    "default_corpus",
    "CorpusSpec",
    "CorpusError",
    "load_corpus_spec",
    "run_corpus",
    "report_json",
    "norm_table",
]

SCHEMA = 1


class CorpusError(ValueError):
    pass


# families ------------------------------------------------------------------------------


def loops_graph(n: int) -> DirectedGraph:
    """One vertex ``v`` carrying ``n`` loops ``l1..ln``."""
    return DirectedGraph(["v"], [(f"l{i}", "v", "v") for i in range(1, n + 1)])


def parallel_graph(k: int) -> DirectedGraph:
    """``k`` parallel edges ``e1..ek`` from ``x`` to ``y``."""
    return DirectedGraph(["x", "y"], [(f"e{i}", "x", "y") for i in range(1, k + 1)])


def cycle2_graph() -> DirectedGraph:
    return DirectedGraph(["x", "y"], [("e", "x", "y"), ("f", "y", "x")])


def cycle_graph(n: int) -> DirectedGraph:
    vs = [f"v{i}" for i in range(n)]
    return DirectedGraph(vs, [(f"a{i}", vs[i], vs[(i + 1) % n]) for i in range(n)])


def chain_graph(n: int) -> DirectedGraph:
    """Source-to-sink path on ``n`` vertices."""
    vs = [f"v{i}" for i in range(n)]
    return DirectedGraph(vs, [(f"a{i}", vs[i], vs[i + 1]) for i in range(n - 1)])


def disjoint_union(*parts: DirectedGraph) -> DirectedGraph:
    """Union with labels prefixed by ``g0_``, ``g1_``, ..."""
    verts, edges = [], []
    for i, g in enumerate(parts):
        verts += [f"g{i}_{v}" for v in g.vertices]
        edges += [(f"g{i}_{e.id}", f"g{i}_{e.src}", f"g{i}_{e.dst}") for e in g.edges]
    return DirectedGraph(verts, edges)


def family(spec: dict) -> DirectedGraph:
    """Build a named family member from ``{"family": name, ...}``."""
    name = spec.get("family")
    try:
        if name == "loops":
            return loops_graph(int(spec["n"]))
        if name == "parallel":
            return parallel_graph(int(spec["k"]))
        if name == "cycle2":
            return cycle2_graph()
        if name == "cycle":
            return cycle_graph(int(spec["n"]))
        if name == "chain":
            return chain_graph(int(spec["n"]))
        if name == "union":
            return disjoint_union(*(_graph_item(p, None)[1] for p in spec["parts"]))
    except KeyError as exc:
        raise CorpusError(f"family {name!r} is missing parameter {exc}") from None
    raise CorpusError(f"unknown family {name!r}")


def default_corpus() -> list[tuple[str, DirectedGraph]]:
    """The built-in test corpus: at most 12 vertices and 16 edges each."""
    G = DirectedGraph
    g5 = G(["x", "y"], [("e", "x", "y"), ("u", "y", "y")])
    return [
        ("G1_point", loops_graph(0)),
        ("G2_two_loops", loops_graph(2)),
        ("G3_three_parallel", parallel_graph(3)),
        ("G4_cycle2", cycle2_graph()),
        ("G5_edge_then_loop", g5),
        ("loops1", loops_graph(1)),
        ("loops3", loops_graph(3)),
        ("loops4", loops_graph(4)),
        ("parallel1", parallel_graph(1)),
        ("parallel2", parallel_graph(2)),
        ("parallel3_reversed", G(["y", "x"], [("f3", "y", "x"), ("f1", "y", "x"), ("f2", "y", "x")])),
        ("chain4", chain_graph(4)),
        ("chain12", chain_graph(12)),
        ("cycle3", cycle_graph(3)),
        ("cycle12", cycle_graph(12)),
        ("loop_then_edge", G(["x", "y"], [("u", "x", "x"), ("e", "x", "y")])),
        ("lollipop", G(["x", "y"], [("a", "x", "x"), ("e", "x", "y"), ("f", "y", "x")])),
        ("double_forward", G(["x", "y"], [("e1", "x", "y"), ("e2", "x", "y"), ("f", "y", "x")])),
        ("out_star5", G(["c"] + [f"l{i}" for i in range(5)], [(f"s{i}", "c", f"l{i}") for i in range(5)])),
        ("in_star5", G(["c"] + [f"l{i}" for i in range(5)], [(f"s{i}", f"l{i}", "c") for i in range(5)])),
        (
            "complete3_loops",
            G(
                ["a", "b", "c"],
                [("aa", "a", "a"), ("bb", "b", "b"), ("cc", "c", "c")]
                + [(f"{s}{t}", s, t) for s in "abc" for t in "abc" if s != t],
            ),
        ),
        (
            "theta",
            G(["x", "y", "z"], [("p", "x", "y"), ("q", "x", "y"), ("r", "y", "z"), ("s", "z", "x"), ("t", "z", "z")]),
        ),
        (
            "mixed6",
            G(
                ["a", "b", "c", "d", "e", "f"],
                [
                    ("a1", "a", "a"),
                    ("a2", "a", "a"),
                    ("ab1", "a", "b"),
                    ("ab2", "a", "b"),
                    ("bc", "b", "c"),
                    ("ca", "c", "a"),
                    ("cd1", "c", "d"),
                    ("cd2", "c", "d"),
                    ("cd3", "c", "d"),
                    ("de", "d", "e"),
                    ("ef", "e", "f"),
                    ("fd", "f", "d"),
                    ("ff", "f", "f"),
                    ("be", "b", "e"),
                    ("dd", "d", "d"),
                    ("fa", "f", "a"),
                ],
            ),
        ),
        ("two_points", disjoint_union(loops_graph(0), loops_graph(0))),
        ("union_G2_G4", disjoint_union(loops_graph(2), cycle2_graph())),
        ("union_G3_G1", disjoint_union(parallel_graph(3), loops_graph(0))),
    ]


# corpus spec ------------------------------------------------------------------------------


@dataclass
class CorpusSpec:
    graphs: list[tuple[str, DirectedGraph]]
    seed: int = 0
    level: int = 4
    report: str | None = None
    roundtrip_seeds: Sequence[int] = (1, 2, 3, 4, 5)
    timings: bool = False


def _graph_item(item, base: FsPath | None) -> tuple[str, DirectedGraph]:
    if isinstance(item, str):
        path = FsPath(item)
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            return path.stem, load_graph(path)
        except OSError as exc:
            raise CorpusError(f"{path}: {exc.strerror}") from None
    if isinstance(item, dict) and "family" in item:
        name = item.get("name") or "_".join(f"{k}{v}" for k, v in item.items() if k != "parts")
        return name, family(item)
    if isinstance(item, dict) and "vertices" in item:
        return item.get("name", "inline"), graph_from_obj(item)
    raise CorpusError(f"cannot interpret corpus item {item!r}")


def load_corpus_spec(path) -> CorpusSpec:
    path = FsPath(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    graphs = []
    for i, item in enumerate(doc.get("graphs", [])):
        try:
            graphs.append(_graph_item(item, path.parent))
        except GraphError as exc:
            raise CorpusError(f"{path}: graphs[{i}]: {exc}") from None
    return CorpusSpec(
        graphs=graphs,
        seed=int(doc.get("seed", 0)),
        level=int(doc.get("level", 4)),
        report=doc.get("report"),
    )


# runner ------------------------------------------------------------------------------------


def norm_table(g: DirectedGraph, F: TruncatedFock) -> dict:
    table = {}
    for e in g.edges:
        est = norm_estimate(L(g, e.id), F.level, fock=F)
        table[f"L_{e.id}"] = [est.lower, est.upper]
    for v in g.vertices:
        loops = g.loop_edges_at(v)
        if loops:
            A = sum((L(g, e) for e in loops[1:]), L(g, loops[0]))
            est = norm_estimate(A, F.level, fock=F)
            table[f"sum_loops_{v}"] = [est.lower, est.upper]
    return table


def _run_one(name: str, g: DirectedGraph, spec: CorpusSpec, fock_builder) -> dict:
    t0 = time.perf_counter()
    out: dict = {"name": name, "vertices": len(g.vertices), "edges": g.n_edges}
    failures: list[str] = []
    F = fock_builder(g, spec.level)
    rel = verify_relations(F)
    out["relations"] = rel.to_json()
    if not rel.passed:
        failures.append("relations")
    out["norms"] = norm_table(g, F)
    out["ball_dims"] = {v: ball_dimension(g, v) for v in g.vertices}
    counts = {}
    for x in g.vertices:
        for y in g.vertices:
            if x == y:
                continue
            try:
                counts[f"{x}->{y}"] = edge_count_via_radical(g, x, y, seed=spec.seed)
            except EdgeCountMismatch as exc:
                counts[f"{x}->{y}"] = None
                failures.append(f"edge_count {x}->{y}: {exc}")
    out["edge_counts"] = {k: v for k, v in counts.items() if v}
    if any(v is None for v in counts.values()):
        out["edge_counts_failed"] = sorted(k for k, v in counts.items() if v is None)
    rt = verify_roundtrip(g, seeds=spec.roundtrip_seeds, probe_seed=spec.seed)
    out["roundtrip"] = rt.to_json()
    if not rt.passed:
        failures.append("roundtrip")
    out["passed"] = not failures
    out["failures"] = failures
    if spec.timings:
        out["seconds"] = round(time.perf_counter() - t0, 3)
    return out


def run_corpus(
    spec: CorpusSpec,
    fock_builder: Callable[[DirectedGraph, int], TruncatedFock] = build_truncated_rep,
    threads: int | None = None,
) -> dict:
    """Run every stage on every graph; results keep input order."""
    if threads is None:
        threads = int(os.environ.get("QUIVALG_THREADS", "1") or 1)
    items = list(spec.graphs)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda it: _run_one(it[0], it[1], spec, fock_builder), items))
    else:
        results = [_run_one(n, g, spec, fock_builder) for n, g in items]
    return {
        "schema": SCHEMA,
        "tool": "quivalg",
        "version": __version__,
        "seed": spec.seed,
        "level": spec.level,
        "roundtrip_seeds": list(spec.roundtrip_seeds),
        "graphs": results,
        "passed": all(r["passed"] for r in results),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"

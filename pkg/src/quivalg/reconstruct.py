"""Rebuild a graph from algebraic probes and check the round trip.

The pipeline only talks to an :class:`AlgebraView`, which answers
questions about vertex projections, characters, nest representations and
radicals.  While it runs, every read of the graph's edge structure is
recorded; reads that do not happen inside a view call count as direct
reads and are reported.
"""

from __future__ import annotations

import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable

from . import characters, nestrep
from .algebra import P
from .graph import _EDGE_READ_HOOK, DirectedGraph, VertexMap, are_isomorphic

__all__ = [
    "AlgebraView",
    "Component",
    "ReconstructedGraph",
    "RoundtripReport",
    "reconstruct",
    "realize",
    "scramble",
    "verify_roundtrip",
    "invariants_differ",
]


class AlgebraView:
    """Probe interface over the tensor algebra of a hidden graph."""

    def __init__(self, g: DirectedGraph, seed: int = 0):
        self.__graph = g
        self.seed = seed
        self.trace: list[tuple] = []
        self.direct_edge_reads = 0
        self._depth = 0

    @contextmanager
    def _probe(self, *call):
        self.trace.append(call)
        self._depth += 1
        try:
            yield self.__graph
        finally:
            self._depth -= 1

    def _on_edge_read(self, g: DirectedGraph) -> None:
        if g is self.__graph and self._depth == 0:
            self.direct_edge_reads += 1

    @contextmanager
    def audit(self):
        token = _EDGE_READ_HOOK.set(self._on_edge_read)
        try:
            yield self
        finally:
            _EDGE_READ_HOOK.reset(token)

    # probes ----------------------------------------------------------------------

    def vertex_projections(self) -> list[str]:
        """Labels of the minimal projections ``P_v`` (one per vertex)."""
        with self._probe("vertex_projections") as g:
            return list(g.vertices)

    def component(self, v: str) -> str:
        """Component of the character space on which ``P_v`` evaluates to 1."""
        with self._probe("component", v) as g:
            rho = characters.character(g, v, [0] * characters.ball_dimension(g, v))
            assert characters.eval_character(rho, P(g, v)) == 1
            return characters.component_of(rho)

    def ball_dimension(self, v: str) -> int:
        with self._probe("ball_dimension", v) as g:
            return characters.ball_dimension(g, v)

    def rep_family_size(self, x: str, y: str) -> int:
        with self._probe("rep_family", x, y) as g:
            return len(nestrep.rep_family(g, x, y))

    def radical_generators(self, x: str, y: str) -> nestrep.RadicalProbe:
        with self._probe("radical_probe", x, y, self.seed) as g:
            probe = nestrep.radical_probe(g, x, y, seed=self.seed)
            if probe.count != probe.direct_count:
                raise nestrep.EdgeCountMismatch(f"radical count mismatch at ({x}, {y})")
            return probe


@dataclass(frozen=True)
class Component:
    label: str
    vertex: str
    ball_dim: int


@dataclass
class ReconstructedGraph:
    components: list[Component]
    pair_counts: dict[tuple[int, int], int]
    provenance: dict[str, str] = field(default_factory=dict)
    trace: list[tuple] = field(default_factory=list, repr=False)
    direct_edge_reads: int = 0

    @property
    def loop_counts(self) -> list[int]:
        return [c.ball_dim for c in self.components]

    def count_matrix(self) -> list[list[int]]:
        n = len(self.components)
        return [
            [self.components[i].ball_dim if i == j else self.pair_counts.get((i, j), 0) for j in range(n)]
            for i in range(n)
        ]

    def to_json(self) -> dict:
        return {
            "components": [{"label": c.label, "vertex": c.vertex, "ball_dim": c.ball_dim} for c in self.components],
            "counts": self.count_matrix(),
            "provenance": dict(sorted(self.provenance.items())),
            "direct_edge_reads": self.direct_edge_reads,
        }


def _build(view: AlgebraView) -> ReconstructedGraph:
    comps: list[Component] = []
    prov: dict[str, str] = {}
    for i, p in enumerate(view.vertex_projections()):
        x = view.component(p)
        label = f"c{i}"
        comps.append(Component(label, x, view.ball_dimension(x)))
        prov[f"{label}.loops"] = f"ball_dimension({x})"
    counts: dict[tuple[int, int], int] = {}
    for i, ci in enumerate(comps):
        for j, cj in enumerate(comps):
            if i == j:
                continue
            if view.rep_family_size(ci.vertex, cj.vertex) == 0:
                continue
            probe = view.radical_generators(ci.vertex, cj.vertex)
            counts[(i, j)] = probe.count
            prov[f"{ci.label}->{cj.label}"] = (
                f"radical_probe({ci.vertex},{cj.vertex}; seed={probe.seed}, probes={len(probe.probes)})"
            )
    return ReconstructedGraph(comps, counts, prov)


def reconstruct(g: DirectedGraph, seed: int = 0) -> ReconstructedGraph:
    view = AlgebraView(g, seed=seed)
    with view.audit():
        R = _build(view)
    R.trace = list(view.trace)
    R.direct_edge_reads = view.direct_edge_reads
    return R


def realize(R: ReconstructedGraph) -> DirectedGraph:
    """A concrete multigraph with fresh labels for a reconstruction."""
    verts = [c.label for c in R.components]
    edges = []
    for c in R.components:
        edges += [(f"{c.label}_l{m}", c.label, c.label) for m in range(c.ball_dim)]
    for (i, j), n in sorted(R.pair_counts.items()):
        a, b = verts[i], verts[j]
        edges += [(f"{a}_{b}_e{m}", a, b) for m in range(n)]
    return DirectedGraph(verts, edges)


def scramble(g: DirectedGraph, seed: int) -> tuple[DirectedGraph, VertexMap]:
    """Relabel and re-list vertices and edges pseudorandomly."""
    rng = random.Random(seed)
    verts = list(g.vertices)
    new_names = [f"s{i}" for i in range(len(verts))]
    rng.shuffle(new_names)
    vmap = dict(zip(verts, new_names))
    edges = list(g.edges)
    enames = [f"t{i}" for i in range(len(edges))]
    rng.shuffle(enames)
    emap = {e.id: n for e, n in zip(edges, enames)}
    new_edges = [(emap[e.id], vmap[e.src], vmap[e.dst]) for e in edges]
    rng.shuffle(new_edges)
    new_verts = sorted(vmap.values(), key=lambda _: rng.random())
    return DirectedGraph(new_verts, new_edges), VertexMap(vmap, emap)


def invariants_differ(R1: ReconstructedGraph, R2: ReconstructedGraph) -> bool:
    """True when the two reconstructions are not isomorphic as graphs."""
    return are_isomorphic(realize(R1), realize(R2)) is None


@dataclass
class RoundtripReport:
    stages: dict[str, bool]
    witness: VertexMap | None
    details: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.stages.values())

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "stages": dict(self.stages),
            "witness": self.witness.to_json() if self.witness else None,
            "details": dict(sorted(self.details.items())),
        }


def verify_roundtrip(g: DirectedGraph, seeds: Iterable[int] = (1, 2, 3, 4, 5), probe_seed: int = 0) -> RoundtripReport:
    stages: dict[str, bool] = {}
    details: dict[str, str] = {}
    try:
        R = reconstruct(g, seed=probe_seed)
    except nestrep.EdgeCountMismatch as exc:
        return RoundtripReport({"reconstruct": False}, None, {"reconstruct": str(exc)})
    stages["reconstruct"] = True
    stages["audit"] = R.direct_edge_reads == 0
    if not stages["audit"]:
        details["audit"] = f"{R.direct_edge_reads} direct edge reads"
    H = realize(R)
    witness = are_isomorphic(H, g)
    stages["isomorphic"] = witness is not None and witness.is_witness(H, g)
    for s in seeds:
        sg, smap = scramble(g, s)
        name = f"scramble[{s}]"
        if not smap.is_witness(g, sg):
            stages[name] = False
            details[name] = "scramble witness is invalid"
            continue
        try:
            Rs = reconstruct(sg, seed=probe_seed)
        except nestrep.EdgeCountMismatch as exc:
            stages[name] = False
            details[name] = str(exc)
            continue
        stages[name] = Rs.direct_edge_reads == 0 and not invariants_differ(Rs, R)
    return RoundtripReport(stages, witness, details)

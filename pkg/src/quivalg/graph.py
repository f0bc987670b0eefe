"""Finite directed multigraphs: data model, JSON parsing and an isomorphism oracle."""

from __future__ import annotations

import json
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

__all__ = [
    "Edge",
    "DirectedGraph",
    "VertexMap",
    "GraphError",
    "parse_graph",
    "load_graph",
    "graph_to_json",
    "loop_edges_at",
    "edges_between",
    "classify_vertices",
    "are_isomorphic",
    "multiplicity_signature",
]


class GraphError(ValueError):
    """Malformed graph document or an invalid graph query."""


class Edge(NamedTuple):
    id: str
    src: str
    dst: str


# Observer for reads of a graph's edge structure.  The reconstruction
# pipeline installs one to prove it never looks at the raw edge list.
_EDGE_READ_HOOK: ContextVar[Callable[["DirectedGraph"], None] | None] = ContextVar(
    "quivalg_edge_read_hook", default=None
)


class DirectedGraph:
    """An immutable finite directed multigraph.

    Parallel edges and loops are allowed.  Vertices and edges keep their
    declaration order, which every downstream enumeration follows.
    """

    __slots__ = ("_vertices", "_edges", "_vindex", "_eindex", "_by_edge", "_out", "_in", "_pair")

    def __init__(self, vertices: Iterable[str], edges: Iterable[Sequence[str]] = ()):
        verts = tuple(str(v) for v in vertices)
        es = tuple(Edge(str(e[0]), str(e[1]), str(e[2])) for e in edges)
        vindex: dict[str, int] = {}
        for i, v in enumerate(verts):
            if v in vindex:
                raise GraphError(f"duplicate vertex id {v!r} at vertices[{i}]")
            vindex[v] = i
        eindex: dict[str, int] = {}
        out: dict[str, list[str]] = {v: [] for v in verts}
        inc: dict[str, list[str]] = {v: [] for v in verts}
        pair: dict[tuple[str, str], list[str]] = {}
        for i, e in enumerate(es):
            if e.id in eindex:
                raise GraphError(f"duplicate edge id {e.id!r} at edges[{i}]")
            for end, name in ((e.src, "source"), (e.dst, "range")):
                if end not in vindex:
                    raise GraphError(f"edges[{i}] ({e.id!r}): undeclared {name} vertex {end!r}")
            eindex[e.id] = i
            out[e.src].append(e.id)
            inc[e.dst].append(e.id)
            pair.setdefault((e.src, e.dst), []).append(e.id)
        self._vertices = verts
        self._edges = es
        self._vindex = vindex
        self._eindex = eindex
        self._by_edge = {e.id: e for e in es}
        self._out = {v: tuple(ids) for v, ids in out.items()}
        self._in = {v: tuple(ids) for v, ids in inc.items()}
        self._pair = {k: tuple(ids) for k, ids in pair.items()}

    def _touch(self) -> None:
        hook = _EDGE_READ_HOOK.get()
        if hook is not None:
            hook(self)

    # vertex structure (never audited) --------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    def has_vertex(self, v: str) -> bool:
        return v in self._vindex

    def vertex_index(self, v: str) -> int:
        try:
            return self._vindex[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def require_vertex(self, v: str) -> None:
        if v not in self._vindex:
            raise GraphError(f"unknown vertex {v!r}")

    # edge structure ---------------------------------------------------------

    @property
    def edges(self) -> tuple[Edge, ...]:
        self._touch()
        return self._edges

    def has_edge(self, e: str) -> bool:
        self._touch()
        return e in self._eindex

    def edge(self, e: str) -> Edge:
        self._touch()
        try:
            return self._by_edge[e]
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def edge_index(self, e: str) -> int:
        self._touch()
        try:
            return self._eindex[e]
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def out_edges(self, v: str) -> tuple[str, ...]:
        self.require_vertex(v)
        self._touch()
        return self._out[v]

    def in_edges(self, v: str) -> tuple[str, ...]:
        self.require_vertex(v)
        self._touch()
        return self._in[v]

    def edges_between(self, u: str, v: str) -> tuple[str, ...]:
        self.require_vertex(u)
        self.require_vertex(v)
        self._touch()
        return self._pair.get((u, v), ())

    def loop_edges_at(self, v: str) -> tuple[str, ...]:
        return self.edges_between(v, v)

    @property
    def n_edges(self) -> int:
        self._touch()
        return len(self._edges)

    # value semantics --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self):
        return hash((self._vertices, self._edges))

    def __repr__(self):
        return f"DirectedGraph(vertices={list(self._vertices)!r}, edges={[list(e) for e in self._edges]!r})"


@dataclass(frozen=True)
class VertexMap:
    """Witness of an isomorphism: vertex and edge bijections."""

    vertices: dict[str, str]
    edges: dict[str, str]

    def inverse(self) -> "VertexMap":
        return VertexMap(
            {b: a for a, b in self.vertices.items()},
            {b: a for a, b in self.edges.items()},
        )

    def to_json(self) -> dict:
        return {"vertices": dict(self.vertices), "edges": dict(self.edges)}

    def is_witness(self, g1: DirectedGraph, g2: DirectedGraph) -> bool:
        """Check that this map really carries ``g1`` onto ``g2``."""
        if sorted(self.vertices) != sorted(g1.vertices):
            return False
        if sorted(self.vertices.values()) != sorted(g2.vertices):
            return False
        e1 = {e.id: e for e in g1.edges}
        e2 = {e.id: e for e in g2.edges}
        if sorted(self.edges) != sorted(e1) or sorted(self.edges.values()) != sorted(e2):
            return False
        for a, b in self.edges.items():
            ea, eb = e1[a], e2[b]
            if self.vertices[ea.src] != eb.src or self.vertices[ea.dst] != eb.dst:
                return False
        return True


# parsing -------------------------------------------------------------------


def parse_graph(text: str | bytes) -> DirectedGraph:
    """Read ``{"vertices": [...], "edges": [[id, src, dst], ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return graph_from_obj(doc)


def graph_from_obj(doc) -> DirectedGraph:
    if not isinstance(doc, dict):
        raise GraphError("graph document must be a JSON object")
    unknown = set(doc) - {"vertices", "edges", "name"}
    if unknown:
        raise GraphError(f"unexpected keys {sorted(unknown)}")
    verts = doc.get("vertices")
    if not isinstance(verts, list):
        raise GraphError("'vertices' must be a list")
    for i, v in enumerate(verts):
        if not isinstance(v, str):
            raise GraphError(f"vertices[{i}] must be a string, got {v!r}")
    edges = doc.get("edges", [])
    if not isinstance(edges, list):
        raise GraphError("'edges' must be a list")
    for i, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 3 and all(isinstance(t, str) for t in e)):
            raise GraphError(f"edges[{i}] must be [edge-id, src, dst] strings, got {e!r}")
    return DirectedGraph(verts, edges)


def load_graph(path) -> DirectedGraph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_graph(text)
    except GraphError as exc:
        raise GraphError(f"{path}: {exc}") from None


def graph_to_json(g: DirectedGraph) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges]}


# structural queries ---------------------------------------------------------


def loop_edges_at(g: DirectedGraph, v: str) -> list[str]:
    """Loop edges at ``v`` in declaration order."""
    return list(g.loop_edges_at(v))


def edges_between(g: DirectedGraph, u: str, v: str) -> list[str]:
    """Edges with source ``u`` and range ``v``."""
    return list(g.edges_between(u, v))


def classify_vertices(g: DirectedGraph) -> tuple[set[str], set[str]]:
    """Return ``(sinks, sources)``: vertices emitting, resp. receiving, no edges."""
    sinks = {v for v in g.vertices if not g.out_edges(v)}
    sources = {v for v in g.vertices if not g.in_edges(v)}
    return sinks, sources


# isomorphism ----------------------------------------------------------------


def _profile(g: DirectedGraph):
    mult: dict[tuple[str, str], int] = {}
    for e in g.edges:
        mult[(e.src, e.dst)] = mult.get((e.src, e.dst), 0) + 1
    out_prof = {v: [] for v in g.vertices}
    in_prof = {v: [] for v in g.vertices}
    for (u, v), m in mult.items():
        if u != v:
            out_prof[u].append(m)
            in_prof[v].append(m)
    key = {
        v: (mult.get((v, v), 0), tuple(sorted(out_prof[v])), tuple(sorted(in_prof[v])))
        for v in g.vertices
    }
    return mult, key


def multiplicity_signature(g: DirectedGraph) -> tuple:
    """Sorted multiset of (loop count, out-profile, in-profile) per vertex."""
    _, key = _profile(g)
    return tuple(sorted(key.values()))


def are_isomorphic(g1: DirectedGraph, g2: DirectedGraph) -> VertexMap | None:
    """Backtracking search for a multigraph isomorphism ``g1 -> g2``.

    Candidates are pruned by loop count and by the sorted multiplicity
    profiles of out- and in-neighbourhoods.  The search order follows the
    declaration order of both graphs, so the witness is deterministic.
    """
    if len(g1.vertices) != len(g2.vertices) or g1.n_edges != g2.n_edges:
        return None
    m1, k1 = _profile(g1)
    m2, k2 = _profile(g2)
    if sorted(k1.values()) != sorted(k2.values()):
        return None

    order = sorted(g1.vertices, key=lambda v: (-len(g1.out_edges(v)) - len(g1.in_edges(v)), g1.vertex_index(v)))
    cands = {v: [w for w in g2.vertices if k2[w] == k1[v]] for v in g1.vertices}
    assign: dict[str, str] = {}
    used: set[str] = set()

    def consistent(v: str, w: str) -> bool:
        for u, t in assign.items():
            if m1.get((v, u), 0) != m2.get((w, t), 0):
                return False
            if m1.get((u, v), 0) != m2.get((t, w), 0):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in cands[v]:
            if w in used or not consistent(v, w):
                continue
            assign[v] = w
            used.add(w)
            if search(i + 1):
                return True
            del assign[v]
            used.discard(w)
        return False

    if not search(0):
        return None
    vmap = {v: assign[v] for v in g1.vertices}
    emap: dict[str, str] = {}
    for e in g1.edges:
        pool = g2.edges_between(vmap[e.src], vmap[e.dst])
        taken = sum(1 for f in g1.edges_between(e.src, e.dst) if f in emap)
        emap[e.id] = pool[taken]
    return VertexMap(vmap, emap)

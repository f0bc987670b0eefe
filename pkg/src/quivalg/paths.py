"""The path space of a graph: enumeration, composition and loop factorization.

Words are written latest edge first: the path that traverses ``e1`` and then
``e2`` is ``e2.e1``.  Its source is the source of ``e1`` and its range the
range of ``e2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .graph import DirectedGraph

__all__ = [
    "Path",
    "PathTable",
    "PathError",
    "vertex_path",
    "edge_path",
    "make_path",
    "parse_path",
    "compose",
    "enumerate_paths",
    "loops_at",
    "primitive_loops_at",
    "is_primitive",
    "factor_loop",
    "loop_weight",
]


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    """A vertex (``edges == ()``) or a composable edge word.

    Identity is the word together with its endpoints; the owning graph is
    carried along for mixed-graph checks but does not take part in
    equality or hashing.
    """

    edges: tuple[str, ...]
    src: str
    dst: str
    graph: DirectedGraph | None = field(default=None, compare=False, repr=False)

    @property
    def length(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_vertex(self) -> bool:
        return not self.edges

    @property
    def is_loop(self) -> bool:
        return bool(self.edges) and self.src == self.dst

    def visits(self) -> list[str]:
        """Vertices passed through, in traversal order (source first)."""
        out = [self.src]
        for e in reversed(self.edges):
            out.append(self.graph.edge(e).dst)
        return out

    def text(self) -> str:
        return self.src if not self.edges else ".".join(self.edges)

    def __str__(self) -> str:
        return self.text()

    def sort_key(self, g: DirectedGraph | None = None) -> tuple:
        g = g or self.graph
        if not self.edges:
            return (0, (g.vertex_index(self.src),))
        return (len(self.edges), tuple(g.edge_index(e) for e in self.edges))


def vertex_path(g: DirectedGraph, v: str) -> Path:
    g.require_vertex(v)
    return Path((), v, v, g)


def edge_path(g: DirectedGraph, e: str) -> Path:
    ed = g.edge(e)
    return Path((e,), ed.src, ed.dst, g)


def make_path(g: DirectedGraph, edges: Iterable[str]) -> Path:
    """Build the path ``e_k...e_1`` from a latest-first edge list."""
    word = tuple(edges)
    if not word:
        raise PathError("empty edge word; use vertex_path for vertices")
    eds = [g.edge(e) for e in word]
    for later, earlier in zip(eds, eds[1:]):
        if later.src != earlier.dst:
            raise PathError(
                f"edges {later.id!r} and {earlier.id!r} are not composable "
                f"(s({later.id})={later.src} != r({earlier.id})={earlier.dst})"
            )
    return Path(word, eds[-1].src, eds[0].dst, g)


def parse_path(g: DirectedGraph, text: str) -> Path:
    """Inverse of :meth:`Path.text`: ``"x"`` for a vertex, ``"e2.e1"`` for a word."""
    s = text.strip()
    if "." not in s:
        is_v, is_e = g.has_vertex(s), g.has_edge(s)
        if is_v and is_e:
            raise PathError(f"{s!r} names both a vertex and an edge")
        if is_v:
            return vertex_path(g, s)
        if is_e:
            return edge_path(g, s)
        raise PathError(f"{s!r} is neither a vertex nor an edge")
    return make_path(g, s.split("."))


def _same_graph(a: Path, b: Path) -> bool:
    return a.graph is b.graph or a.graph is None or b.graph is None or a.graph == b.graph


def compose(w2: Path, w1: Path) -> Path | None:
    """The concatenation ``w2 w1`` when ``s(w2) == r(w1)``, else ``None``."""
    if not _same_graph(w2, w1):
        raise PathError("cannot compose paths from different graphs")
    if w2.src != w1.dst:
        return None
    if not w2.edges:
        return w1
    if not w1.edges:
        return w2
    return Path(w2.edges + w1.edges, w1.src, w2.dst, w2.graph or w1.graph)


class PathTable:
    """All paths of length at most ``max_len``, level-major.

    Within a level, words are ordered lexicographically by edge
    declaration index (reading the word left to right).
    """

    def __init__(self, g: DirectedGraph, max_len: int):
        if max_len < 0:
            raise ValueError("max_len must be >= 0")
        self.graph = g
        self.max_len = max_len
        levels: list[list[Path]] = [[Path((), v, v, g) for v in g.vertices]]
        edges = g.edges
        for _ in range(max_len):
            prev = levels[-1]
            by_range: dict[str, list[Path]] = {}
            for w in prev:
                by_range.setdefault(w.dst, []).append(w)
            nxt = []
            for e in edges:
                for w in by_range.get(e.src, ()):
                    nxt.append(Path((e.id,) + w.edges, w.src, e.dst, g))
            levels.append(nxt)
        self.by_length = levels
        self.paths: list[Path] = [w for lvl in levels for w in lvl]
        self.index: dict[Path, int] = {w: i for i, w in enumerate(self.paths)}
        self.level_offsets: list[int] = []
        off = 0
        for lvl in levels:
            self.level_offsets.append(off)
            off += len(lvl)

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[Path]:
        return iter(self.paths)

    def __contains__(self, w: Path) -> bool:
        return w in self.index

    def level_counts(self) -> list[int]:
        return [len(lvl) for lvl in self.by_length]

    def levels_upto(self, m: int) -> range:
        """Index range of all paths with length <= m."""
        m = min(m, self.max_len)
        if m < 0:
            return range(0)
        end = self.level_offsets[m] + len(self.by_length[m])
        return range(end)


def enumerate_paths(g: DirectedGraph, max_len: int) -> PathTable:
    return PathTable(g, max_len)


def loops_at(g: DirectedGraph, x: str, max_len: int) -> list[Path]:
    """All loops at ``x`` (length 1..max_len), level-major lexicographic."""
    g.require_vertex(x)
    out: list[Path] = []
    frontier = [Path((), x, x, g)]
    for _ in range(max_len):
        nxt = []
        for e in g.edges:
            for w in frontier:
                if w.dst == e.src:
                    nxt.append(Path((e.id,) + w.edges, x, e.dst, g))
        frontier = nxt
        out.extend(w for w in frontier if w.dst == x)
    return out


def is_primitive(u: Path) -> bool:
    """A loop is primitive when it returns to its base only at the end."""
    if not u.is_loop:
        return False
    g = u.graph
    x = u.src
    # the vertex between edges[i] and edges[i+1] is s(edges[i])
    return all(g.edge(e).src != x for e in u.edges[:-1])


def primitive_loops_at(g: DirectedGraph, x: str, max_len: int) -> list[Path]:
    """Loops at ``x`` of length <= max_len with no intermediate return to ``x``."""
    g.require_vertex(x)
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    found: list[Path] = []
    # grow words forward from x, never re-entering x before closing up
    frontier: list[tuple[tuple[str, ...], str]] = [((), x)]
    for _ in range(max_len):
        nxt = []
        for word, at in frontier:
            for eid in g.out_edges(at):
                dst = g.edge(eid).dst
                if dst == x:
                    found.append(Path((eid,) + word, x, x, g))
                else:
                    nxt.append(((eid,) + word, dst))
        frontier = nxt
    found.sort(key=lambda p: p.sort_key(g))
    return found


def factor_loop(u: Path) -> list[Path]:
    """Cut a loop at every intermediate visit to its base vertex.

    The factors are returned latest first, so composing them left to right
    gives back ``u``.
    """
    if not u.is_loop:
        raise PathError(f"{u.text()!r} is not a loop")
    g = u.graph
    x = u.src
    factors: list[Path] = []
    start = 0
    for i, e in enumerate(u.edges):
        if g.edge(e).src == x:
            factors.append(Path(u.edges[start : i + 1], x, x, g))
            start = i + 1
    return factors


def loop_weight(u: Path) -> int:
    """Number of primitive loops whose product is ``u``."""
    return len(factor_loop(u))

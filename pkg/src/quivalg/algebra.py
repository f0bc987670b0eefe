"""Polynomials in the creation operators: finitely supported Fourier series.

An element is a finite sum ``sum a_w L_w`` over paths ``w``; vertex paths
give the projections ``P_v``.  Coefficients are exact complex rationals, so
products, corners and degree cuts are decided without tolerances.
"""

from __future__ import annotations

import random
from typing import Iterable, Iterator, Mapping

from .graph import DirectedGraph, GraphError
from .paths import Path, PathError, compose, edge_path, make_path, parse_path, vertex_path
from .scalars import CQ, ZERO, Scalarish, as_cq, format_rational, parse_rational

__all__ = [
    "AlgebraElement",
    "AlgebraError",
    "P",
    "L",
    "Lw",
    "identity",
    "multiply",
    "add_scale",
    "corner",
    "phi",
    "fourier_coeff",
    "random_element",
    "parse_element",
]


class AlgebraError(ValueError):
    pass


class AlgebraElement:
    """An immutable finitely supported series ``sum a_w L_w``."""

    __slots__ = ("graph", "_coeffs", "_hash")

    def __init__(self, graph: DirectedGraph, coeffs: Mapping[Path, Scalarish] | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        data: dict[Path, CQ] = {}
        for w, a in items:
            if w.graph is not None and w.graph is not graph and w.graph != graph:
                raise AlgebraError(f"path {w.text()!r} belongs to a different graph")
            a = as_cq(a)
            acc = data.get(w)
            a = a if acc is None else acc + a
            if a:
                data[w] = a
            else:
                data.pop(w, None)
        self.graph = graph
        self._coeffs = data
        self._hash = None

    @classmethod
    def _trusted(cls, graph: DirectedGraph, data: dict[Path, CQ]) -> "AlgebraElement":
        obj = object.__new__(cls)
        obj.graph = graph
        obj._coeffs = data
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, graph: DirectedGraph) -> "AlgebraElement":
        return cls._trusted(graph, {})

    # read access -------------------------------------------------------------

    @property
    def coeffs(self) -> Mapping[Path, CQ]:
        return dict(self._coeffs)

    def items(self) -> Iterator[tuple[Path, CQ]]:
        return iter(self._coeffs.items())

    def support(self) -> list[Path]:
        return list(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def coeff(self, w: Path) -> CQ:
        return self._coeffs.get(w, ZERO)

    @property
    def degree(self) -> int:
        """Longest supported path; 0 for the zero element."""
        return max((len(w) for w in self._coeffs), default=0)

    # arithmetic --------------------------------------------------------------

    def _check(self, other: "AlgebraElement") -> None:
        if self.graph is not other.graph and self.graph != other.graph:
            raise AlgebraError("elements live over different graphs")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return add_scale(self, other, 1, 1)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return add_scale(self, other, 1, -1)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def scale(self, alpha: Scalarish) -> "AlgebraElement":
        alpha = as_cq(alpha)
        if not alpha:
            return AlgebraElement.zero(self.graph)
        return AlgebraElement._trusted(self.graph, {w: a * alpha for w, a in self._coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self.graph is other.graph or self.graph == other.graph) and self._coeffs == other._coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    # text / json ---------------------------------------------------------------

    def sorted_items(self) -> list[tuple[Path, CQ]]:
        return sorted(self._coeffs.items(), key=lambda kv: kv[0].sort_key(self.graph))

    def text(self) -> str:
        if not self._coeffs:
            return "0"
        return " + ".join(f"{a}·{w.text()}" for w, a in self.sorted_items())

    __str__ = text

    def __repr__(self):
        return f"AlgebraElement({self.text()})"

    def to_json(self) -> list:
        return [[w.text(), format_rational(a.re), format_rational(a.im)] for w, a in self.sorted_items()]

    @classmethod
    def from_json(cls, g: DirectedGraph, doc) -> "AlgebraElement":
        if not isinstance(doc, list):
            raise AlgebraError("element JSON must be a list of [path, re, im]")
        terms = []
        for i, t in enumerate(doc):
            if not (isinstance(t, list) and len(t) == 3):
                raise AlgebraError(f"term {i} must be [path, re, im], got {t!r}")
            try:
                terms.append((parse_path(g, t[0]), CQ(parse_rational(str(t[1])), parse_rational(str(t[2])))))
            except (PathError, GraphError, ValueError) as exc:
                raise AlgebraError(f"term {i}: {exc}") from None
        return cls(g, terms)


# constructors ---------------------------------------------------------------


def P(g: DirectedGraph, v: str) -> AlgebraElement:
    """The vertex projection ``P_v``."""
    return AlgebraElement._trusted(g, {vertex_path(g, v): CQ(1)})


def L(g: DirectedGraph, e: str) -> AlgebraElement:
    """The creation operator ``L_e``."""
    return AlgebraElement._trusted(g, {edge_path(g, e): CQ(1)})


def Lw(g: DirectedGraph, w: Path | str | Iterable[str]) -> AlgebraElement:
    """``L_w`` for a path, a path text like ``"f.e"``, or a latest-first edge list."""
    if isinstance(w, str):
        w = parse_path(g, w)
    elif not isinstance(w, Path):
        w = make_path(g, w)
    return AlgebraElement._trusted(g, {w: CQ(1)})


def identity(g: DirectedGraph) -> AlgebraElement:
    """``sum_v P_v``, the unit of the polynomial algebra of a finite graph."""
    return AlgebraElement._trusted(g, {vertex_path(g, v): CQ(1) for v in g.vertices})


# operations -----------------------------------------------------------------


def multiply(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    """``(AB)_w = sum over w = uv of a_u b_v``."""
    A._check(B)
    out: dict[Path, CQ] = {}
    by_range: dict[str, list[tuple[Path, CQ]]] = {}
    for v, b in B._coeffs.items():
        by_range.setdefault(v.dst, []).append((v, b))
    for u, a in A._coeffs.items():
        for v, b in by_range.get(u.src, ()):
            w = compose(u, v)
            c = out.get(w)
            c = a * b if c is None else c + a * b
            if c:
                out[w] = c
            else:
                out.pop(w, None)
    return AlgebraElement._trusted(A.graph, out)


def add_scale(A: AlgebraElement, B: AlgebraElement, alpha: Scalarish, beta: Scalarish) -> AlgebraElement:
    """``alpha*A + beta*B`` with zero coefficients dropped."""
    A._check(B)
    alpha, beta = as_cq(alpha), as_cq(beta)
    out: dict[Path, CQ] = {}
    if alpha:
        for w, a in A._coeffs.items():
            out[w] = a * alpha
    if beta:
        for w, b in B._coeffs.items():
            c = out.get(w)
            c = b * beta if c is None else c + b * beta
            if c:
                out[w] = c
            else:
                out.pop(w, None)
    return AlgebraElement._trusted(A.graph, out)


def corner(A: AlgebraElement, x: str, y: str) -> AlgebraElement:
    """``P_y A P_x``: keep the terms of paths from ``x`` to ``y``."""
    A.graph.require_vertex(x)
    A.graph.require_vertex(y)
    return AlgebraElement._trusted(
        A.graph, {w: a for w, a in A._coeffs.items() if w.src == x and w.dst == y}
    )


def phi(A: AlgebraElement, m: int) -> AlgebraElement:
    """Keep only the terms of length exactly ``m``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return AlgebraElement._trusted(A.graph, {w: a for w, a in A._coeffs.items() if len(w) == m})


def fourier_coeff(A: AlgebraElement, w: Path) -> CQ:
    if w.graph is not None and w.graph is not A.graph and w.graph != A.graph:
        raise AlgebraError("path and element live over different graphs")
    return A.coeff(w)


# random elements --------------------------------------------------------------


def _random_scalar(rng: random.Random, complex_coeffs: bool) -> CQ:
    def q():
        return CQ(rng.randint(-4, 4)) / rng.randint(1, 3)

    z = q()
    if complex_coeffs:
        z = z + q() * CQ(0, 1)
    return z if z else CQ(1)


def random_paths(g: DirectedGraph, rng: random.Random, count: int, max_degree: int) -> list[Path]:
    """Draw paths by random walks; lengths uniform in ``0..max_degree`` when possible."""
    out = []
    verts = g.vertices
    if not verts:
        return out
    for _ in range(count):
        v = rng.choice(verts)
        w = vertex_path(g, v)
        for _ in range(rng.randint(0, max_degree)):
            outs = g.out_edges(w.dst)
            if not outs:
                break
            w = compose(edge_path(g, rng.choice(outs)), w)
        out.append(w)
    return out


def random_element(
    g: DirectedGraph,
    rng: random.Random,
    max_support: int = 8,
    max_degree: int = 3,
    complex_coeffs: bool = True,
) -> AlgebraElement:
    """A seeded random polynomial with at most ``max_support`` terms."""
    n = rng.randint(1, max_support)
    terms = [(w, _random_scalar(rng, complex_coeffs)) for w in random_paths(g, rng, n, max_degree)]
    return AlgebraElement(g, terms)


def parse_element(g: DirectedGraph, text: str) -> AlgebraElement:
    """Read the text form ``"a·w + b·u + ..."`` produced by :meth:`AlgebraElement.text`.

    A bare path means coefficient 1; ``*`` is accepted in place of ``·``.
    """
    s = text.strip()
    if s in ("", "0"):
        return AlgebraElement.zero(g)
    terms = []
    for chunk in _split_terms(s):
        chunk = chunk.replace("*", "·")
        if "·" in chunk:
            coef, path = chunk.rsplit("·", 1)
            a = as_cq(coef)
        else:
            a, path = CQ(1), chunk
        try:
            terms.append((parse_path(g, path), a))
        except (PathError, GraphError) as exc:
            raise AlgebraError(str(exc)) from None
    return AlgebraElement(g, terms)


def _split_terms(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and s.startswith(" + ", i):
            parts.append("".join(cur).strip())
            cur = []
            i += 3
            continue
        cur.append(ch)
        i += 1
    parts.append("".join(cur).strip())
    return [p for p in parts if p]

"""Two-dimensional nest representations and edge counting through the radical.

For an edge ``e: x1 -> x2`` with ``x1 != x2`` the span of ``xi_e, xi_{x1}`` is
co-invariant, and compressing to it gives an upper-triangular
representation.  In the basis ``(xi_e, xi_{x1})``::

    pi_e(A) = [[a_{x2}, a_e],
               [0,      a_{x1}]]
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .algebra import AlgebraElement, AlgebraError, L, corner, phi, random_element
from .characters import Character, character, eval_character
from .graph import DirectedGraph
from .linalg import row_reduce
from .paths import edge_path, vertex_path
from .scalars import CQ, ZERO

__all__ = [
    "Mat2",
    "NestRep",
    "NestRepError",
    "EdgeCountMismatch",
    "RadicalProbe",
    "nest_rep",
    "eval_nest",
    "mat2_mul",
    "mat2_is_zero",
    "rep_family",
    "in_radical",
    "radical_probe",
    "edge_count_via_radical",
]

Mat2 = tuple[tuple[CQ, CQ], tuple[CQ, CQ]]


class NestRepError(ValueError):
    pass


class EdgeCountMismatch(AssertionError):
    """The radical span dimension disagrees with the number of edges."""


def mat2_mul(a: Mat2, b: Mat2) -> Mat2:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def mat2_is_zero(a: Mat2) -> bool:
    return not (a[0][0] or a[0][1] or a[1][0] or a[1][1])


def _zero_character(g: DirectedGraph, v: str) -> Character:
    return character(g, v, [0] * len(g.loop_edges_at(v)))


@dataclass(frozen=True)
class NestRep:
    graph: DirectedGraph
    edge: str
    src: str
    dst: str
    rho_src: Character = field(repr=False)
    rho_dst: Character = field(repr=False)

    @property
    def basis(self) -> tuple[str, str]:
        return (self.edge, self.src)


def nest_rep(g: DirectedGraph, e: str) -> NestRep:
    ed = g.edge(e)
    if ed.src == ed.dst:
        raise NestRepError(f"edge {e!r} is a loop; the compression is not a nest representation")
    return NestRep(g, e, ed.src, ed.dst, _zero_character(g, ed.src), _zero_character(g, ed.dst))


def eval_nest(pi: NestRep, A: AlgebraElement) -> Mat2:
    if A.graph is not pi.graph and A.graph != pi.graph:
        raise AlgebraError("representation and element live over different graphs")
    g = pi.graph
    a_dst = A.coeff(vertex_path(g, pi.dst))
    a_e = A.coeff(edge_path(g, pi.edge))
    a_src = A.coeff(vertex_path(g, pi.src))
    return ((a_dst, a_e), (ZERO, a_src))


def rep_family(g: DirectedGraph, x: str, y: str) -> list[NestRep]:
    """One representation per edge from ``x`` to ``y``."""
    if x == y:
        raise NestRepError("rep families are defined for distinct vertices only")
    return [nest_rep(g, e) for e in g.edges_between(x, y)]


def in_radical(A: AlgebraElement, x: str, y: str) -> bool:
    """Whether ``A`` lies in the radical of the quotient by ``K_{x,y}``.

    True iff every family member sends ``A`` to a square-zero matrix and
    the ``lambda = 0`` characters at ``x`` and ``y`` both vanish on ``A``.
    """
    g = A.graph
    for pi in rep_family(g, x, y):
        M = eval_nest(pi, A)
        if not mat2_is_zero(mat2_mul(M, M)):
            return False
    return not eval_character(_zero_character(g, x), A) and not eval_character(_zero_character(g, y), A)


@dataclass
class RadicalProbe:
    x: str
    y: str
    family: list[NestRep]
    probes: list[AlgebraElement]
    span_basis: list[AlgebraElement]
    count: int
    direct_count: int
    seed: int

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "family_size": len(self.family),
            "family_edges": [pi.edge for pi in self.family],
            "span_basis": [b.to_json() for b in self.span_basis],
            "count": self.count,
            "direct_count": self.direct_count,
            "seed": self.seed,
        }


def radical_probe(g: DirectedGraph, x: str, y: str, seed: int = 0, n_random: int = 6) -> RadicalProbe:
    """Dimension of the span of degree-one parts of radical corner representatives.

    Probes are every degree-one generator ``L_e`` of the algebra plus
    ``n_random`` seeded random polynomials of degree <= 3.  Each probe is
    replaced by its corner ``P_y A P_x`` (which represents the same coset
    when the probe is radical), kept only if it is radical, and cut to its
    degree-one part; the count is the rank of those parts.
    """
    if x == y:
        raise NestRepError("edge counting through the radical needs x != y")
    g.require_vertex(x)
    g.require_vertex(y)
    family = rep_family(g, x, y)
    rng = random.Random(seed)
    raw = [L(g, e.id) for e in g.edges]
    raw += [random_element(g, rng, max_support=8, max_degree=3) for _ in range(n_random)]
    probes = []
    for A in raw:
        R = corner(A, x, y)
        if in_radical(R, x, y):
            probes.append(R)
    rows = [{w: a for w, a in phi(R, 1).items()} for R in probes]
    cols = sorted({w for r in rows for w in r}, key=lambda w: w.sort_key(g))
    basis_rows = row_reduce(rows, cols)
    span_basis = [AlgebraElement(g, row) for row in basis_rows]
    direct = len(g.edges_between(x, y))
    return RadicalProbe(x, y, family, probes, span_basis, len(span_basis), direct, seed)


def edge_count_via_radical(g: DirectedGraph, x: str, y: str, seed: int = 0) -> int:
    probe = radical_probe(g, x, y, seed=seed)
    if probe.count != probe.direct_count:
        raise EdgeCountMismatch(
            f"radical span for ({x}, {y}) has dimension {probe.count}, "
            f"but the graph has {probe.direct_count} edges"
        )
    return probe.count

"""Truncated Fock representation.

The Fock space is cut to ``span{xi_w : |w| <= k}``.  ``L_e`` creates and then
truncates: ``L_e xi_w = xi_{ew}`` when ``s(e) = r(w)`` and ``|w| < k``, and 0
otherwise.  Generator matrices are integer ``scipy.sparse`` CSC arrays, so the
relation checks are exact.  Elements with rational coefficients are
represented by :class:`ExactMatrix`, a column-major map of exact scalars.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .algebra import AlgebraElement, AlgebraError
from .graph import DirectedGraph
from .linalg import is_psd_exact
from .paths import Path, PathTable, compose, factor_loop, loops_at, primitive_loops_at
from .scalars import CQ, ZERO, Scalarish, as_cq, format_rational

__all__ = [
    "TruncatedFock",
    "ExactMatrix",
    "RelationCheck",
    "RelationReport",
    "NormEstimate",
    "LoopWordMap",
    "build_truncated_rep",
    "represent",
    "represent_numeric",
    "verify_relations",
    "eigenvector",
    "loop_eigenvector",
    "norm_estimate",
    "power_norm",
    "corner_word_bijection",
    "word_text",
    "coo_text",
]


@dataclass(frozen=True)
class TruncatedFock:
    graph: DirectedGraph
    level: int
    table: PathTable
    # successor maps: succ[e][j] is the row of L_e xi_j, or -1
    succ: Mapping[str, np.ndarray]
    edge_ops: Mapping[str, sp.csc_array]
    vertex_ops: Mapping[str, sp.csc_array]
    range_index: np.ndarray = field(repr=False)  # vertex index of r(w) per basis path
    lengths: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.table)

    def basis_text(self, j: int) -> str:
        return self.table.paths[j].text()

    def columns_upto(self, m: int) -> np.ndarray:
        return np.nonzero(self.lengths <= m)[0]

    def index_map(self, w: Path) -> np.ndarray:
        """Row of ``L_w xi_j`` for every column ``j`` (-1 where it vanishes)."""
        n = self.dim
        if w.is_vertex:
            v = self.graph.vertex_index(w.src)
            return np.where(self.range_index == v, np.arange(n), -1)
        m = np.arange(n)
        for e in reversed(w.edges):
            s = self.succ[e]
            ok = m >= 0
            m = np.where(ok, s[np.where(ok, m, 0)], -1)
        return m

    def check_invariants(self) -> list[str]:
        """Structural problems with the generator matrices (empty when sound)."""
        problems = []
        for name, M in itertools.chain(
            (("L_" + e, M) for e, M in self.edge_ops.items()),
            (("P_" + v, M) for v, M in self.vertex_ops.items()),
        ):
            per_col = np.diff(M.indptr)
            if per_col.size and per_col.max() > 1:
                problems.append(f"{name} has a column with more than one nonzero")
        total = sp.csc_array((self.dim, self.dim), dtype=np.int64)
        for v, M in self.vertex_ops.items():
            if (M - sp.diags_array(M.diagonal())).count_nonzero():
                problems.append(f"P_{v} is not diagonal")
            if ((M @ M) - M).count_nonzero():
                problems.append(f"P_{v} is not idempotent")
            total = total + M
        if self.dim and (total - sp.eye_array(self.dim, dtype=np.int64, format="csc")).count_nonzero():
            problems.append("vertex projections do not sum to the identity")
        return problems


def build_truncated_rep(g: DirectedGraph, k: int) -> TruncatedFock:
    if k < 1:
        raise ValueError("truncation level must be >= 1")
    table = PathTable(g, k)
    n = len(table)
    index = table.index
    succ: dict[str, np.ndarray] = {e.id: np.full(n, -1, dtype=np.int64) for e in g.edges}
    out = {v: g.out_edges(v) for v in g.vertices}
    for m in range(k):
        off = table.level_offsets[m]
        for j, w in enumerate(table.by_length[m], start=off):
            for eid in out[w.dst]:
                ew = Path((eid,) + w.edges, w.src, g.edge(eid).dst, g)
                succ[eid][j] = index[ew]
    cols = np.arange(n)
    edge_ops = {}
    for eid, s in succ.items():
        ok = s >= 0
        edge_ops[eid] = sp.csc_array(
            (np.ones(int(ok.sum()), dtype=np.int64), (s[ok], cols[ok])), shape=(n, n)
        )
    range_index = np.array([g.vertex_index(w.dst) for w in table.paths], dtype=np.int64)
    vertex_ops = {}
    for i, v in enumerate(g.vertices):
        d = (range_index == i).astype(np.int64)
        vertex_ops[v] = sp.csc_array(sp.diags_array(d, format="csc"), dtype=np.int64)
    lengths = np.array([len(w) for w in table.paths], dtype=np.int64)
    return TruncatedFock(g, k, table, succ, edge_ops, vertex_ops, range_index, lengths)


# exact matrices ---------------------------------------------------------------


class ExactMatrix:
    """Sparse square matrix of exact scalars, stored column by column."""

    __slots__ = ("shape", "cols")

    def __init__(self, n: int, cols: dict[int, dict[int, CQ]] | None = None):
        self.shape = (n, n)
        self.cols = cols if cols is not None else {}

    def column(self, j: int) -> dict[int, CQ]:
        return self.cols.get(j, {})

    def entry(self, i: int, j: int) -> CQ:
        return self.cols.get(j, {}).get(i, ZERO)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def entries(self) -> list[tuple[int, int, CQ]]:
        return sorted((i, j, v) for j, c in self.cols.items() for i, v in c.items())

    def apply_column(self, vec: Mapping[int, CQ]) -> dict[int, CQ]:
        out: dict[int, CQ] = {}
        for j, x in vec.items():
            for i, v in self.cols.get(j, {}).items():
                c = out.get(i)
                c = v * x if c is None else c + v * x
                if c:
                    out[i] = c
                else:
                    out.pop(i, None)
        return out

    def matmul(self, other: "ExactMatrix", columns: Iterable[int] | None = None) -> "ExactMatrix":
        """``self @ other``, optionally only on the given columns."""
        js = other.cols.keys() if columns is None else columns
        cols = {}
        for j in js:
            c = self.apply_column(other.column(j))
            if c:
                cols[j] = c
        return ExactMatrix(self.shape[0], cols)

    __matmul__ = matmul

    def restrict_columns(self, columns: Iterable[int]) -> "ExactMatrix":
        return ExactMatrix(self.shape[0], {j: dict(self.cols[j]) for j in columns if j in self.cols})

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def to_scipy(self) -> sp.csr_array:
        n = self.shape[0]
        trip = self.entries()
        if not trip:
            return sp.csr_array((n, n), dtype=np.complex128)
        rows, cols, vals = zip(*trip)
        return sp.csr_array((np.array([complex(v) for v in vals]), (rows, cols)), shape=(n, n))


def represent(A: AlgebraElement, F: TruncatedFock, columns: Iterable[int] | None = None) -> ExactMatrix:
    """``sum a_w L_w`` on the truncated space, exactly.

    With ``columns`` only those columns are filled in; the rest read as zero.
    """
    if A.graph is not F.graph and A.graph != F.graph:
        raise AlgebraError("element and representation use different graphs")
    if A.degree > F.level:
        raise AlgebraError(f"degree {A.degree} exceeds truncation level {F.level}")
    keep = None
    if columns is not None:
        keep = np.zeros(F.dim, dtype=bool)
        keep[np.fromiter(columns, dtype=np.int64)] = True
    cols: dict[int, dict[int, CQ]] = {}
    for w, a in A.items():
        m = F.index_map(w)
        hit = m >= 0
        if keep is not None:
            hit &= keep
        for j in np.nonzero(hit)[0].tolist():
            i = int(m[j])
            col = cols.setdefault(j, {})
            c = col.get(i)
            c = a if c is None else c + a
            if c:
                col[i] = c
            else:
                col.pop(i)
                if not col:
                    del cols[j]
    return ExactMatrix(F.dim, cols)


def represent_numeric(A: AlgebraElement, F: TruncatedFock) -> sp.csr_array:
    """Floating-point CSR version of :func:`represent`."""
    if A.degree > F.level:
        raise AlgebraError(f"degree {A.degree} exceeds truncation level {F.level}")
    n = F.dim
    rows, cols, vals = [], [], []
    for w, a in A.items():
        m = F.index_map(w)
        ok = np.nonzero(m >= 0)[0]
        rows.append(m[ok])
        cols.append(ok)
        vals.append(np.full(ok.size, complex(a)))
    if not rows:
        return sp.csr_array((n, n), dtype=np.complex128)
    return sp.csr_array(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )


def coo_text(M: ExactMatrix | sp.sparray) -> str:
    """``"rows cols nnz"`` header, then one ``"row col re im"`` line per entry."""
    if isinstance(M, ExactMatrix):
        trip = [(i, j, format_rational(v.re), format_rational(v.im)) for i, j, v in M.entries()]
        n, m = M.shape
    else:
        C = sp.coo_array(M)
        n, m = C.shape
        order = np.lexsort((C.col, C.row))
        trip = []
        for t in order:
            v = C.data[t]
            re, im = (v.real, v.imag) if np.iscomplexobj(C.data) else (v, 0)
            trip.append((int(C.row[t]), int(C.col[t]), _num(re), _num(im)))
    lines = [f"{n} {m} {len(trip)}"]
    lines += [f"{i} {j} {re} {im}" for i, j, re, im in trip]
    return "\n".join(lines) + "\n"


def _num(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


# relations ----------------------------------------------------------------------


@dataclass
class RelationCheck:
    relation: int
    name: str
    passed: bool
    max_level: int
    counterexample: str | None = None
    detail: str | None = None

    def to_json(self) -> dict:
        return {
            "relation": self.relation,
            "name": self.name,
            "passed": self.passed,
            "max_level": self.max_level,
            "counterexample": self.counterexample,
            "detail": self.detail,
        }


@dataclass
class RelationReport:
    level: int
    checks: list[RelationCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {"level": self.level, "passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _first_bad_column(M: sp.sparray, allowed: np.ndarray) -> int | None:
    C = sp.csc_array(M)
    C.eliminate_zeros()
    nz_cols = np.nonzero(np.diff(C.indptr))[0]
    bad = nz_cols[allowed[nz_cols]]
    return int(bad[0]) if bad.size else None


def verify_relations(F: TruncatedFock) -> RelationReport:
    """Check the four defining relations on the truncated space.

    (1) and (4) are checked on every column.  (2) and (3) involve ``L_e``
    followed by an adjoint, which loses information at the top level, so
    they are checked on columns of length at most ``k - 1`` only.
    """
    g = F.graph
    k = F.level
    n = F.dim
    everywhere = np.ones(n, dtype=bool)
    below = F.lengths <= k - 1
    checks: list[RelationCheck] = []

    def run(rel: int, name: str, level: int, items) -> None:
        for label, M, allowed in items:
            j = _first_bad_column(M, allowed)
            if j is not None:
                checks.append(RelationCheck(rel, name, False, level, F.basis_text(j), label))
                return
        checks.append(RelationCheck(rel, name, True, level))

    verts = list(F.vertex_ops)
    run(
        1,
        "P_x P_y = 0 (x != y)",
        k,
        ((f"x={x}, y={y}", F.vertex_ops[x] @ F.vertex_ops[y], everywhere) for x in verts for y in verts if x != y),
    )
    eids = list(F.edge_ops)
    run(
        2,
        "L_e* L_f = 0 (e != f)",
        k - 1,
        ((f"e={e}, f={f}", F.edge_ops[e].T @ F.edge_ops[f], below) for e in eids for f in eids if e != f),
    )
    run(
        3,
        "L_e* L_e = P_s(e)",
        k - 1,
        (
            (f"e={e}", F.edge_ops[e].T @ F.edge_ops[e] - F.vertex_ops[g.edge(e).src], below)
            for e in eids
        ),
    )

    failed4 = None
    for x in verts:
        D = F.vertex_ops[x].copy()
        for e in g.in_edges(x):
            if e in F.edge_ops:
                D = D - F.edge_ops[e] @ F.edge_ops[e].T
        C = sp.coo_array(D)
        entries = {(int(i), int(j)): int(v) for i, j, v in zip(C.row, C.col, C.data) if v}
        if not is_psd_exact(entries):
            bad = [j for (i, j), v in sorted(entries.items(), key=lambda t: (t[0][1], t[0][0])) if i != j or v < 0]
            col = bad[0] if bad else min(j for _, j in entries)
            failed4 = (f"x={x}", col)
            break
    if failed4:
        checks.append(RelationCheck(4, "sum_{r(e)=x} L_e L_e* <= P_x", False, k, F.basis_text(failed4[1]), failed4[0]))
    else:
        checks.append(RelationCheck(4, "sum_{r(e)=x} L_e L_e* <= P_x", True, k))
    return RelationReport(k, checks)


# eigenvectors --------------------------------------------------------------------


def _lambda_vector(g: DirectedGraph, x: str, lam: Sequence[Scalarish]) -> tuple[tuple[str, ...], list[CQ]]:
    loops = g.loop_edges_at(x)
    lam = [as_cq(z) for z in lam]
    if len(lam) != len(loops):
        raise ValueError(f"lambda has {len(lam)} entries but {x!r} has {len(loops)} loop edges")
    if sum((z.abs2() for z in lam), CQ().re) >= 1:
        raise ValueError("eigenvectors need ||lambda|| < 1")
    return loops, lam


def loop_eigenvector(g: DirectedGraph, x: str, lam: Sequence[Scalarish], k: int) -> list[np.ndarray]:
    """Truncated eigenvector, level by level, in loop-word coordinates.

    Level ``j`` is a vector of length ``n**j`` holding ``conj(w(lambda))``
    for the words ``w`` of length ``j`` in the loop edges at ``x``, indexed by
    the base-``n`` code of the word (latest letter most significant).  The
    whole vector is normalized to unit length.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _, lam = _lambda_vector(g, x, lam)
    cl = np.array([complex(z).conjugate() for z in lam], dtype=np.complex128)
    levels = [np.ones(1, dtype=np.complex128)]
    for _ in range(k):
        levels.append(np.kron(cl, levels[-1]))
    norm = math.sqrt(sum(float(np.vdot(v, v).real) for v in levels))
    return [v / norm for v in levels]


def eigenvector(
    g: DirectedGraph, x: str, lam: Sequence[Scalarish], k: int, fock: TruncatedFock | None = None
) -> np.ndarray:
    """Unit vector proportional to ``sum conj(w(lambda)) xi_w`` over loop words at ``x``."""
    loops, _ = _lambda_vector(g, x, lam)
    F = fock or build_truncated_rep(g, k)
    if F.level != k:
        raise ValueError("fock level does not match k")
    levels = loop_eigenvector(g, x, lam, k)
    n = len(loops)
    vec = np.zeros(F.dim, dtype=np.complex128)
    for j, lv in enumerate(levels):
        for code, val in enumerate(lv):
            letters = []
            c = code
            for _ in range(j):
                c, r = divmod(c, n)
                letters.append(loops[r])
            letters.reverse()
            w = Path(tuple(letters), x, x, g)
            vec[F.table.index[w]] = val
    return vec


# norms ------------------------------------------------------------------------------


@dataclass(frozen=True)
class NormEstimate:
    lower: float
    upper: float
    iterations: int = 0


def power_norm(M: sp.sparray, max_iter: int = 500, rtol: float = 1e-12) -> tuple[float, int]:
    """Largest singular value of ``M`` by power iteration on ``M* M``.

    Starts from the normalized all-ones vector.  Returns the best ``||M v||``
    seen over unit iterates, which is always a lower bound for ``||M||``.
    """
    n = M.shape[1]
    if n == 0 or M.count_nonzero() == 0:
        return 0.0, 0
    MH = M.conj().T
    v = np.ones(n, dtype=np.complex128) / math.sqrt(n)
    best = 0.0
    prev = None
    it = 0
    for it in range(1, max_iter + 1):
        Mv = M @ v
        est = float(np.linalg.norm(Mv))
        best = max(best, est)
        if est == 0.0:
            break
        if prev is not None and abs(est - prev) <= rtol * est:
            break
        prev = est
        u = MH @ Mv
        nu = np.linalg.norm(u)
        if nu == 0.0:
            break
        v = u / nu
    return best, it


def norm_estimate(A: AlgebraElement, k: int, fock: TruncatedFock | None = None) -> NormEstimate:
    """Lower bound from power iteration at level ``k``, upper bound ``sum |a_w|``."""
    if A.degree > k:
        raise AlgebraError(f"degree {A.degree} exceeds truncation level {k}")
    upper = math.fsum(abs(a) for _, a in A.items())
    if not A:
        return NormEstimate(0.0, 0.0, 0)
    F = fock or build_truncated_rep(A.graph, k)
    lower, its = power_norm(represent_numeric(A, F))
    # round-off can push the iterate a hair over the exact bound
    lower = min(lower, upper)
    return NormEstimate(lower, upper, its)


# loop words -----------------------------------------------------------------------------


@dataclass
class LoopWordMap:
    """Loops at ``x`` written as words in the primitive loops ``u_1, u_2, ...``."""

    vertex: str
    max_len: int
    primitives: list[Path]
    words: dict[Path, tuple[int, ...]]
    bijective: bool
    intertwining: bool
    detail: str | None = None

    def text_words(self) -> dict[str, str]:
        return {w.text(): word_text(t, len(self.primitives)) for w, t in self.words.items()}


def word_text(word: tuple[int, ...], alphabet: int | None = None) -> str:
    """``(1, 2) -> "12"``; dot-separated once the alphabet reaches 10 letters."""
    if alphabet is not None and alphabet >= 10:
        return ".".join(map(str, word))
    return "".join(map(str, word))


def _free_words(lengths: Sequence[int], budget: int) -> set[tuple[int, ...]]:
    """All words over ``1..n`` whose letters' lengths sum to at most ``budget``."""
    out: set[tuple[int, ...]] = set()
    frontier: list[tuple[tuple[int, ...], int]] = [((), 0)]
    while frontier:
        nxt = []
        for word, used in frontier:
            for i, ln in enumerate(lengths, start=1):
                if used + ln <= budget:
                    w = word + (i,)
                    out.add(w)
                    nxt.append((w, used + ln))
        frontier = nxt
    return out


def corner_word_bijection(g: DirectedGraph, x: str, L: int, fock: TruncatedFock | None = None) -> LoopWordMap:
    """Identify loops at ``x`` (length <= L) with words over the primitive loops.

    Also checks on the level-``L`` Fock space that ``L_{u_i}`` acts on the
    span of ``xi_x`` and the loops at ``x`` as the ``i``-th free creation
    operator (truncated by total edge length).
    """
    g.require_vertex(x)
    if L < 1:
        raise ValueError("L must be >= 1")
    prims = primitive_loops_at(g, x, L)
    pos = {u: i for i, u in enumerate(prims, start=1)}
    loops = loops_at(g, x, L)
    words: dict[Path, tuple[int, ...]] = {}
    for u in loops:
        words[u] = tuple(pos[f] for f in factor_loop(u))
    images = list(words.values())
    expected = _free_words([len(u) for u in prims], L)
    bijective = len(set(images)) == len(images) and set(images) == expected

    F = fock or build_truncated_rep(g, L)
    base = Path((), x, x, g)
    wandering = [base] + loops
    word_of = dict(words)
    word_of[base] = ()
    detail = None
    ok = True
    cols = [F.table.index[w] for w in wandering]
    for i, u in enumerate(prims, start=1):
        M = represent(AlgebraElement(g, {u: 1}), F, columns=cols)
        for w in wandering:
            j = F.table.index[w]
            col = M.column(j)
            if len(u) + len(w) <= F.level:
                target = compose(u, w)
                want = {F.table.index[target]: CQ(1)}
                if col != want or word_of.get(target) != (i,) + word_of[w]:
                    ok, detail = False, f"L_{u.text()} on xi_{w.text()}"
                    break
            elif col:
                ok, detail = False, f"L_{u.text()} on xi_{w.text()} should vanish past the truncation"
                break
        if not ok:
            break
    return LoopWordMap(x, L, prims, words, bijective, ok, detail)

import dataclasses
import math
import random

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, SMALL
from strategies import elements, graphs
from quivalg.algebra import AlgebraElement, AlgebraError, L, Lw, fourier_coeff, identity, multiply, random_element
from quivalg.fock import (
    build_truncated_rep,
    coo_text,
    corner_word_bijection,
    eigenvector,
    norm_estimate,
    power_norm,
    represent,
    represent_numeric,
    verify_relations,
)
from quivalg.paths import enumerate_paths, parse_path
from quivalg.scalars import CQ, as_cq


class TestBuild:
    def test_dimensions(self, g1, g2, g4):
        assert build_truncated_rep(g2, 2).dim == 7
        assert build_truncated_rep(g4, 2).dim == 6
        F = build_truncated_rep(g1, 5)
        assert F.dim == 1 and not F.edge_ops
        assert (F.vertex_ops["v"].toarray() == [[1]]).all()

    def test_level_must_be_positive(self, g2):
        with pytest.raises(ValueError):
            build_truncated_rep(g2, 0)

    @pytest.mark.parametrize("name, g", CORPUS, ids=[n for n, _ in CORPUS])
    def test_invariants(self, name, g):
        F = build_truncated_rep(g, 3)
        assert F.check_invariants() == []
        assert F.dim == len(enumerate_paths(g, 3))

    def test_creation_entries(self, g4):
        F = build_truncated_rep(g4, 2)
        idx = F.table.index
        Le = F.edge_ops["e"].toarray()
        # L_e xi_w = xi_{ew} exactly when s(e) = r(w) and |w| < k
        for w in F.table.paths:
            col = Le[:, idx[w]]
            if w.dst == "x" and len(w) < 2:
                ew = parse_path(g4, "e" if w.is_vertex else "e." + w.text())
                assert col[idx[ew]] == 1 and col.sum() == 1
            else:
                assert not col.any()


class TestRepresent:
    def test_unit(self, g4):
        F = build_truncated_rep(g4, 3)
        M = represent(identity(g4), F)
        assert all(M.column(j) == {j: 1} for j in range(F.dim))

    def test_two_step(self, g4):
        F = build_truncated_rep(g4, 2)
        M = represent(Lw(g4, "f.e"), F)
        idx = F.table.index
        assert M.entries() == [(idx[parse_path(g4, "f.e")], idx[parse_path(g4, "x")], CQ(1))]

    def test_zero(self, g4):
        F = build_truncated_rep(g4, 2)
        assert represent(AlgebraElement.zero(g4), F).nnz == 0

    def test_degree_too_high(self, g4):
        F = build_truncated_rep(g4, 1)
        with pytest.raises(AlgebraError):
            represent(Lw(g4, "f.e"), F)
        with pytest.raises(AlgebraError):
            norm_estimate(Lw(g4, "f.e"), 1)

    def test_numeric_matches_exact(self, g4):
        F = build_truncated_rep(g4, 3)
        A = CQ(1, 2) * L(g4, "e") + CQ("1/3") * Lw(g4, "f.e")
        assert np.allclose(represent(A, F).to_scipy().toarray(), represent_numeric(A, F).toarray())

    def test_coo_text(self, g4):
        F = build_truncated_rep(g4, 2)
        text = coo_text(represent(CQ("1/2", -1) * Lw(g4, "f.e"), F))
        assert text == "6 6 1\n5 0 1/2 -1\n"
        num = coo_text(represent_numeric(2 * L(g4, "e"), F))
        assert num.splitlines()[0] == "6 6 2"
        assert all(line.split()[2:] == ["2", "0"] for line in num.splitlines()[1:])


class TestRelations:
    def test_cycle(self, g4):
        rep = verify_relations(build_truncated_rep(g4, 3))
        assert rep.passed
        assert [c.max_level for c in rep.checks] == [3, 2, 2, 3]

    def test_two_loops(self, g2):
        rep = verify_relations(build_truncated_rep(g2, 2))
        assert rep.passed
        assert rep.checks[2].relation == 3 and rep.checks[2].max_level == 1

    def test_vacuous(self, g1):
        assert verify_relations(build_truncated_rep(g1, 1)).passed

    def test_boundary_really_fails(self, g2):
        # relation (3) on the top level is false, which is why it is excluded
        F = build_truncated_rep(g2, 2)
        La = F.edge_ops["a"]
        D = (La.T @ La - F.vertex_ops["v"]).toarray()
        assert D[:, F.lengths == 2].any()
        assert not D[:, F.lengths < 2].any()

    def test_tampered_edge_matrix(self, g4):
        F = build_truncated_rep(g4, 3)
        bad = F.edge_ops["e"].tolil()
        bad[0, 0] = 1  # L_e xi_x gains a xi_x component
        G = dataclasses.replace(F, edge_ops={**F.edge_ops, "e": sp.csc_array(bad)})
        rep = verify_relations(G)
        assert not rep.passed
        failed = [c for c in rep.checks if not c.passed]
        assert failed[0].counterexample == "x"

    def test_tampered_projection(self, g4):
        F = build_truncated_rep(g4, 2)
        Px = F.vertex_ops["x"].tolil()
        Px[1, 1] = 1  # now overlaps P_y at xi_y
        G = dataclasses.replace(F, vertex_ops={**F.vertex_ops, "x": sp.csc_array(Px)})
        rep = verify_relations(G)
        assert not rep.checks[0].passed and rep.checks[0].counterexample == "y"

    def test_relation_four_violation(self, g2):
        F = build_truncated_rep(g2, 2)
        # pretend b duplicates a: L_a L_a* + L_b L_b* then exceeds P_v
        G = dataclasses.replace(F, edge_ops={"a": F.edge_ops["a"], "b": F.edge_ops["a"]})
        rep = verify_relations(G)
        assert not rep.checks[3].passed

    @pytest.mark.parametrize("name, g", CORPUS, ids=[n for n, _ in CORPUS])
    def test_defect_is_vacuum_projection(self, name, g):
        # oracle: P_x - sum L_e L_e* projects exactly onto xi_x
        F = build_truncated_rep(g, 3)
        for x in g.vertices:
            D = F.vertex_ops[x].toarray()
            for e in g.in_edges(x):
                M = F.edge_ops[e]
                D = D - (M @ M.T).toarray()
            want = np.zeros(F.dim, dtype=np.int64)
            want[F.table.index[parse_path(g, x)]] = 1
            assert (D == np.diag(want)).all()


class TestEigenvector:
    def test_vacuum(self, g2, g4):
        F = build_truncated_rep(g2, 3)
        v = eigenvector(g2, "v", (0, 0), 3, fock=F)
        assert v[F.table.index[parse_path(g2, "v")]] == 1 and np.count_nonzero(v) == 1
        v4 = eigenvector(g4, "x", (), 2)
        assert v4[0] == 1 and np.count_nonzero(v4) == 1

    def test_half(self, g2):
        F = build_truncated_rep(g2, 3)
        v = eigenvector(g2, "v", ("1/2", 0), 3, fock=F)
        raw = np.zeros(F.dim)
        for text, c in [("v", 1), ("a", 1 / 2), ("a.a", 1 / 4), ("a.a.a", 1 / 8)]:
            raw[F.table.index[parse_path(g2, text)]] = c
        assert np.allclose(v, raw / np.linalg.norm(raw), atol=1e-15)

    def test_conjugated_components(self, g2):
        F = build_truncated_rep(g2, 2)
        v = eigenvector(g2, "v", ("1/2", CQ(0, "1/3")), 2, fock=F)
        ratio = v[F.table.index[parse_path(g2, "b.a")]] / v[0]
        assert ratio == pytest.approx(complex(0, -1 / 3) * 0.5)

    def test_errors(self, g2):
        with pytest.raises(ValueError):
            eigenvector(g2, "v", (1, 0), 2)
        with pytest.raises(ValueError):
            eigenvector(g2, "v", ("1/2",), 2)

    @pytest.mark.parametrize("lam", [("1/2", "1/3"), ("-2/5", CQ(0, "1/2")), (CQ("1/4", "1/4"), "3/5")])
    def test_adjoint_defect_decreases(self, g2, lam):
        zs = [complex(as_cq(z)) for z in lam]
        r2 = sum(abs(z) ** 2 for z in zs)
        defects = {0: [], 1: []}
        for k in range(1, 9):
            F = build_truncated_rep(g2, k)
            v = eigenvector(g2, "v", lam, k, fock=F)
            # closed form: only the top level is lost, |lam_i| r^k / ||untruncated-to-k vector||
            top = math.sqrt(r2**k / sum(r2**j for j in range(k + 1)))
            for i, e in enumerate(("a", "b")):
                M = F.edge_ops[e].astype(np.complex128)
                d = np.linalg.norm(M.T @ v - np.conj(zs[i]) * v)
                assert d == pytest.approx(abs(zs[i]) * top, abs=1e-12)
                defects[i].append(d)
        for seq in defects.values():
            assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))

    def test_adjoint_exact_at_zero(self, g2):
        F = build_truncated_rep(g2, 4)
        v = eigenvector(g2, "v", (0, 0), 4, fock=F)
        for e in ("a", "b"):
            assert not (F.edge_ops[e].T @ v).any()


class TestNorms:
    def test_partial_isometry(self, g2):
        est = norm_estimate(L(g2, "a"), 3)
        assert est.lower == pytest.approx(1, abs=1e-12) and est.upper == 1

    @pytest.mark.parametrize("k", [1, 2, 3, 5])
    def test_orthogonal_ranges(self, g2, k):
        A = L(g2, "a") + L(g2, "b")
        F = build_truncated_rep(g2, k)
        M = represent_numeric(A, F)
        # Gram oracle: M* M = 2 P_v below the top level
        gram = (M.conj().T @ M).toarray()
        below = F.lengths < k
        assert np.allclose(gram[np.ix_(below, below)], 2 * np.eye(below.sum()))
        est = norm_estimate(A, k, fock=F)
        assert abs(est.lower - math.sqrt(2)) <= 1e-10 and est.upper == 2

    def test_zero(self, g2):
        est = norm_estimate(AlgebraElement.zero(g2), 2)
        assert (est.lower, est.upper) == (0, 0)

    def test_power_norm_against_svd(self):
        rng = np.random.default_rng(0)
        M = sp.csr_array(rng.standard_normal((30, 30)))
        got, _ = power_norm(M, max_iter=5000)
        assert got == pytest.approx(np.linalg.norm(M.toarray(), 2), rel=1e-8)

    @pytest.mark.parametrize("name, g", SMALL, ids=[n for n, _ in SMALL])
    def test_lower_nondecreasing_in_k(self, name, g):
        rng = random.Random(name)
        for _ in range(5):
            A = random_element(g, rng, max_degree=2)
            lows = [norm_estimate(A, k).lower for k in range(2, 6)]
            assert all(b >= a - 1e-9 for a, b in zip(lows, lows[1:]))
            assert lows[-1] <= norm_estimate(A, 5).upper


class TestCornerWords:
    def test_two_loops(self, g2):
        m = corner_word_bijection(g2, "v", 2)
        assert m.text_words() == {"a": "1", "b": "2", "a.a": "11", "a.b": "12", "b.a": "21", "b.b": "22"}
        assert m.bijective and m.intertwining

    def test_cycle(self, g4):
        m = corner_word_bijection(g4, "x", 4)
        assert m.text_words() == {"f.e": "1", "f.e.f.e": "11"}
        assert m.bijective and m.intertwining

    def test_no_loops(self, g3):
        m = corner_word_bijection(g3, "x", 4)
        assert m.words == {} and m.bijective and m.intertwining

    def test_unknown_vertex(self, g3):
        with pytest.raises(Exception):
            corner_word_bijection(g3, "q", 2)


@settings(max_examples=60, deadline=None)
@given(
    graphs(max_vertices=3, max_edges=5).flatmap(lambda g: st.tuples(st.just(g), elements(g, 2), elements(g, 2))),
    st.integers(4, 5),
)
def test_homomorphism_at_safe_depth(gab, k):
    g, A, B = gab
    d = A.degree + B.degree
    F = build_truncated_rep(g, k)
    safe = F.columns_upto(k - d).tolist()
    left = represent(multiply(A, B), F).restrict_columns(safe)
    right = represent(A, F).matmul(represent(B, F), columns=safe)
    assert left == right


@settings(max_examples=60, deadline=None)
@given(graphs(max_vertices=3, max_edges=5).flatmap(lambda g: st.tuples(st.just(g), elements(g, 3))))
def test_fourier_consistency(ga):
    g, A = ga
    F = build_truncated_rep(g, 3)
    M = represent(A, F)
    idx = F.table.index
    for w in F.table.paths:
        assert fourier_coeff(A, w) == M.entry(idx[w], idx[parse_path(g, w.src)])

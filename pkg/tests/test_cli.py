import dataclasses
import json
import subprocess
import sys

import pytest
import scipy.sparse as sp

from conftest import G1, G2, G3, G4, G5
from quivalg import cli
from quivalg.corpus import (
    CorpusError,
    CorpusSpec,
    default_corpus,
    disjoint_union,
    family,
    load_corpus_spec,
    loops_graph,
    report_json,
    run_corpus,
)
from quivalg.dot import emit_dot
from quivalg.fock import RelationCheck, RelationReport, build_truncated_rep
from quivalg.graph import are_isomorphic, graph_to_json
from quivalg.reconstruct import reconstruct

FIVE = [("G1", G1()), ("G2", G2()), ("G3", G3()), ("G4", G4()), ("G5", G5())]


def write_graph(tmp_path, name, g):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(graph_to_json(g)))
    return str(p)


class TestCorpus:
    def test_five_pass(self):
        rep = run_corpus(CorpusSpec(FIVE, level=4))
        assert rep["passed"] and [r["name"] for r in rep["graphs"]] == ["G1", "G2", "G3", "G4", "G5"]
        assert rep["graphs"][2]["edge_counts"] == {"x->y": 3}
        assert rep["graphs"][1]["ball_dims"] == {"v": 2}

    def test_corrupted_relation_matrix(self):
        def broken(g, k):
            F = build_truncated_rep(g, k)
            if not F.edge_ops:
                return F
            e = next(iter(F.edge_ops))
            M = F.edge_ops[e].tolil()
            M[0, 0] += 1
            return dataclasses.replace(F, edge_ops={**F.edge_ops, e: sp.csc_array(M)})

        rep = run_corpus(CorpusSpec(FIVE, level=3), fock_builder=broken)
        assert not rep["passed"]
        g4 = rep["graphs"][3]
        assert "relations" in g4["failures"]
        bad = [c for c in g4["relations"]["checks"] if not c["passed"]]
        assert bad and bad[0]["counterexample"] == "x"
        assert rep["graphs"][0]["passed"]  # no edges, nothing to corrupt

    def test_empty(self):
        rep = run_corpus(CorpusSpec([]))
        assert rep["passed"] and rep["graphs"] == []

    def test_records_seed_and_level(self):
        rep = run_corpus(CorpusSpec(FIVE[:1], seed=11, level=3))
        assert (rep["seed"], rep["level"], rep["schema"]) == (11, 3, 1)

    def test_byte_identical(self):
        spec = CorpusSpec(default_corpus()[:12], seed=3)
        a = report_json(run_corpus(spec, threads=1))
        b = report_json(run_corpus(spec, threads=4))
        assert a == b

    def test_thread_env(self, monkeypatch):
        monkeypatch.setenv("QUIVALG_THREADS", "3")
        assert run_corpus(CorpusSpec(FIVE))["passed"]

    def test_spec_file(self, tmp_path):
        path = write_graph(tmp_path, "four", G4())
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(
            json.dumps(
                {
                    "seed": 2,
                    "level": 3,
                    "graphs": [
                        "four.json",
                        {"family": "loops", "n": 3},
                        {"family": "union", "parts": [{"family": "cycle2"}, path], "name": "u"},
                        {"name": "inline", "vertices": ["p"], "edges": [["q", "p", "p"]]},
                    ],
                }
            )
        )
        spec = load_corpus_spec(spec_path)
        assert [n for n, _ in spec.graphs] == ["four", "familyloops_n3", "u", "inline"]
        assert (spec.seed, spec.level) == (2, 3)
        assert are_isomorphic(spec.graphs[2][1], disjoint_union(G4(), G4())) is not None

    def test_spec_errors(self, tmp_path):
        p = tmp_path / "spec.json"
        p.write_text('{"graphs": [\n  "missing.json"]}')
        with pytest.raises(CorpusError, match="missing.json"):
            load_corpus_spec(p)
        p.write_text('{"graphs": [\n  {"vertices": ["a"], "edges": [["e", "a", "b"]]}]}')
        with pytest.raises(CorpusError, match=r"graphs\[0\]"):
            load_corpus_spec(p)
        p.write_text('{"graphs": [,]}')
        with pytest.raises(CorpusError, match="line 1"):
            load_corpus_spec(p)
        with pytest.raises(CorpusError):
            family({"family": "nope"})
        with pytest.raises(CorpusError, match="'n'"):
            family({"family": "loops"})

    def test_default_corpus_limits(self):
        corpus = default_corpus()
        assert len(corpus) >= 20
        assert all(len(g.vertices) <= 12 and g.n_edges <= 16 for _, g in corpus)
        assert len({n for n, _ in corpus}) == len(corpus)


class TestDot:
    def test_cycle(self):
        text = emit_dot(G4())
        assert text.count("->") == 2 and '[label="e"]' in text and '[label="f"]' in text
        assert text == emit_dot(G4())

    def test_reconstructed(self):
        text = emit_dot(reconstruct(G3()))
        assert text.count('"c0" -> "c1"') == 3

    def test_point(self):
        text = emit_dot(G1())
        assert "->" not in text and '"v";' in text

    def test_graph_name(self):
        text = emit_dot(loops_graph(2), name="L2")
        assert text.splitlines()[0] == 'digraph "L2" {'


class TestCommands:
    @pytest.fixture
    def g4file(self, tmp_path):
        return write_graph(tmp_path, "g4", G4())

    def run(self, capsys, *argv):
        code = cli.main(list(argv))
        return code, capsys.readouterr()

    def test_parse(self, capsys, g4file):
        code, out = self.run(capsys, "parse", g4file)
        assert code == 0 and json.loads(out.out)["n_edges"] == 2

    def test_paths(self, capsys, g4file):
        code, out = self.run(capsys, "paths", g4file, "--level", "3", "--loops-at", "x")
        doc = json.loads(out.out)
        assert doc["counts"] == [2, 2, 2, 2] and doc["primitive_loops"] == ["f.e"]

    def test_fock(self, capsys, g4file):
        code, out = self.run(capsys, "fock", g4file, "--level", "3")
        doc = json.loads(out.out)
        assert code == 0 and doc["dim"] == 8 and doc["relations"]["passed"]
        assert doc["norms"]["L_e"] == [1.0, 1.0]

    def test_fock_coo(self, capsys, g4file):
        code, out = self.run(capsys, "fock", g4file, "--level", "2", "--coo", "(1/2-i)·f.e")
        assert out.out == "6 6 1\n5 0 1/2 -1\n"

    def test_fock_failure_exit(self, capsys, g4file, monkeypatch):
        bad = RelationReport(2, [RelationCheck(1, "P_x P_y = 0 (x != y)", False, 2, "x")])
        monkeypatch.setattr(cli, "verify_relations", lambda F: bad)
        code, _ = self.run(capsys, "fock", g4file)
        assert code == 1

    def test_chars(self, capsys, tmp_path):
        path = write_graph(tmp_path, "g2", G2())
        code, out = self.run(capsys, "chars", path, "--element", "v + a + a.a", "--at", "v", "--lam", "1/2", "0")
        doc = json.loads(out.out)
        assert code == 0 and doc["value"] == "7/4" and doc["ball_dims"] == {"v": 2}

    def test_chars_needs_vertex(self, capsys, g4file):
        code, out = self.run(capsys, "chars", g4file, "--element", "e")
        assert code == 2 and "--at" in out.err

    def test_radical(self, capsys, tmp_path):
        path = write_graph(tmp_path, "g3", G3())
        code, out = self.run(capsys, "radical", path, "x", "y", "--seed", "5")
        doc = json.loads(out.out)
        assert code == 0 and doc["count"] == doc["direct_count"] == doc["family_size"] == 3
        assert doc["seed"] == 5

    def test_reconstruct(self, capsys, g4file):
        code, out = self.run(capsys, "reconstruct", g4file)
        doc = json.loads(out.out)
        assert code == 0 and doc["roundtrip"] == "pass"
        assert doc["counts"] == [[0, 1], [1, 0]] and doc["witness"]["vertices"] == {"c0": "x", "c1": "y"}

    def test_corpus_text_and_out(self, capsys, tmp_path):
        out_path = tmp_path / "r.json"
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"graphs": [{"family": "cycle2"}, {"family": "parallel", "k": 2}]}))
        code, _ = self.run(capsys, "corpus", str(spec), "--out", str(out_path), "--seed", "9")
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["seed"] == 9 and doc["passed"] and len(doc["graphs"]) == 2
        code, out = self.run(capsys, "corpus", str(spec), "--text")
        assert out.out.splitlines()[-1] == "overall: pass"

    def test_dot(self, capsys, g4file):
        code, out = self.run(capsys, "dot", g4file, "--reconstructed")
        assert code == 0 and '"c0" -> "c1"' in out.out

    def test_text_format(self, capsys, g4file):
        code, out = self.run(capsys, "parse", g4file, "--text")
        assert "n_edges: 2" in out.out

    @pytest.mark.parametrize(
        "argv",
        [
            ["parse", "/nonexistent/graph.json"],
            ["radical", "{g}", "x", "x"],
            ["radical", "{g}", "x", "q"],
            ["chars", "{g}", "--element", "e.e", "--at", "x"],
            ["paths", "{g}", "--loops-at", "q"],
        ],
    )
    def test_input_errors(self, capsys, g4file, argv):
        code, out = self.run(capsys, *[a.replace("{g}", g4file) for a in argv])
        assert code == 2 and out.err.startswith("quivalg: error:")

    def test_bad_json(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"vertices": ["v"],\n "edges": [}')
        code, out = self.run(capsys, "parse", str(p))
        assert code == 2 and "line 2" in out.err

    def test_module_entry_point(self, g4file):
        proc = subprocess.run([sys.executable, "-m", "quivalg", "parse", g4file], capture_output=True, text=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["n_vertices"] == 2

import itertools
import random

import numpy as np
import pytest

from quivalg.corpus import default_corpus
from quivalg.graph import DirectedGraph, parse_graph


def G1():
    return parse_graph('{"vertices":["v"],"edges":[]}')


def G2():
    return parse_graph('{"vertices":["v"],"edges":[["a","v","v"],["b","v","v"]]}')


def G3():
    return parse_graph('{"vertices":["x","y"],"edges":[["e1","x","y"],["e2","x","y"],["e3","x","y"]]}')


def G4():
    return DirectedGraph(["x", "y"], [("e", "x", "y"), ("f", "y", "x")])


def G5():
    return DirectedGraph(["x", "y"], [("e", "x", "y"), ("u", "y", "y")])


CORPUS = default_corpus()
SMALL = [(n, g) for n, g in CORPUS if g.n_edges <= 6 and len(g.vertices) <= 6]


@pytest.fixture
def g1():
    return G1()


@pytest.fixture
def g2():
    return G2()


@pytest.fixture
def g3():
    return G3()


@pytest.fixture
def g4():
    return G4()


@pytest.fixture
def g5():
    return G5()


# brute-force oracles ----------------------------------------------------------------


def adjacency(g):
    """``M[i, j]`` = number of edges from vertex ``j`` to vertex ``i``."""
    n = len(g.vertices)
    M = np.zeros((n, n), dtype=object)
    for e in g.edges:
        M[g.vertex_index(e.dst), g.vertex_index(e.src)] += 1
    return M


def multiplicity_matrix(g, order):
    pos = {v: i for i, v in enumerate(order)}
    M = [[0] * len(order) for _ in order]
    for e in g.edges:
        M[pos[e.src]][pos[e.dst]] += 1
    return M


def isomorphic_bruteforce(g1, g2):
    if len(g1.vertices) != len(g2.vertices) or g1.n_edges != g2.n_edges:
        return False
    target = multiplicity_matrix(g2, list(g2.vertices))
    for perm in itertools.permutations(g1.vertices):
        # perm[i] is the g1 vertex sent to g2.vertices[i]
        if multiplicity_matrix(g1, list(perm)) == target:
            return True
    return False


def relabel(g, rng):
    vs = list(g.vertices)
    names = [f"w{i}" for i in range(len(vs))]
    rng.shuffle(names)
    vm = dict(zip(vs, names))
    edges = [(f"z{i}", vm[e.src], vm[e.dst]) for i, e in enumerate(g.edges)]
    rng.shuffle(edges)
    order = list(vm.values())
    rng.shuffle(order)
    return DirectedGraph(order, edges)


@pytest.fixture
def rng():
    return random.Random(12345)


# acceptance summary ------------------------------------------------------------------

ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)

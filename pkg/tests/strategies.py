from hypothesis import strategies as st

from quivalg.algebra import AlgebraElement
from quivalg.graph import DirectedGraph
from quivalg.paths import enumerate_paths
from quivalg.scalars import CQ


@st.composite
def graphs(draw, max_vertices=4, max_edges=6, min_edges=0):
    n = draw(st.integers(1, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    m = draw(st.integers(min_edges, max_edges))
    ends = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=m, max_size=m))
    return DirectedGraph(vs, [(f"e{i}", vs[s], vs[t]) for i, (s, t) in enumerate(ends)])


small_rationals = st.fractions(min_value=-3, max_value=3, max_denominator=5)


@st.composite
def scalars(draw, complex_coeffs=True):
    re = draw(small_rationals)
    im = draw(small_rationals) if complex_coeffs else 0
    return CQ(re, im)


@st.composite
def elements(draw, g, max_degree=3, max_support=8):
    table = enumerate_paths(g, max_degree)
    paths = draw(st.lists(st.sampled_from(table.paths), max_size=max_support))
    return AlgebraElement(g, [(w, draw(scalars())) for w in paths])

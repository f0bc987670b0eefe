"""Tensor algebras of finite directed graphs: path spaces, truncated Fock
representations, characters, nest representations, and graph reconstruction
from algebraic probes."""

__version__ = "0.1.0"

from .algebra import AlgebraElement, L, Lw, P, add_scale, corner, fourier_coeff, identity, multiply, parse_element, phi
from .characters import ball_dimension, character, component_of, eval_character
from .fock import build_truncated_rep, corner_word_bijection, eigenvector, norm_estimate, represent, verify_relations
from .graph import DirectedGraph, VertexMap, are_isomorphic, classify_vertices, edges_between, load_graph, loop_edges_at, parse_graph
from .nestrep import edge_count_via_radical, eval_nest, in_radical, nest_rep, rep_family
from .paths import Path, compose, enumerate_paths, factor_loop, primitive_loops_at
from .reconstruct import realize, reconstruct, scramble, verify_roundtrip
from .scalars import CQ

__all__ = [
    "AlgebraElement", "CQ", "DirectedGraph", "L", "Lw", "P", "Path", "VertexMap",
    "add_scale", "are_isomorphic", "ball_dimension", "build_truncated_rep", "character",
    "classify_vertices", "component_of", "compose", "corner", "corner_word_bijection",
    "edge_count_via_radical", "edges_between", "eigenvector", "enumerate_paths",
    "eval_character", "eval_nest", "factor_loop", "fourier_coeff", "identity", "in_radical",
    "load_graph", "loop_edges_at", "multiply", "nest_rep", "norm_estimate", "parse_element",
    "parse_graph", "phi",
    "primitive_loops_at", "realize", "reconstruct", "rep_family", "represent", "scramble",
    "verify_relations", "verify_roundtrip",
]

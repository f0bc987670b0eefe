"""DOT output for graphs and reconstructions."""

from __future__ import annotations

from .graph import DirectedGraph
from .reconstruct import ReconstructedGraph, realize

__all__ = ["emit_dot"]


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(g: DirectedGraph | ReconstructedGraph, name: str = "G") -> str:
    """Deterministic ``digraph`` text; edges are labelled with their ids.

    Reconstructions are realized first, so their nodes are ``c0, c1, ...``.
    """
    if isinstance(g, ReconstructedGraph):
        g = realize(g)
    lines = [f"digraph {_q(name)} {{"]
    lines += [f"  {_q(v)};" for v in g.vertices]
    lines += [f"  {_q(e.src)} -> {_q(e.dst)} [label={_q(e.id)}];" for e in g.edges]
    lines.append("}")
    return "\n".join(lines) + "\n"

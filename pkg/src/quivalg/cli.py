"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath

from . import __version__
from .algebra import AlgebraError, parse_element
from .characters import CharacterError, ball_dimension, character, eval_character
from .corpus import CorpusError, CorpusSpec, default_corpus, load_corpus_spec, norm_table, report_json, run_corpus
from .dot import emit_dot
from .fock import build_truncated_rep, coo_text, represent, verify_relations
from .graph import GraphError, classify_vertices, graph_to_json, load_graph
from .nestrep import NestRepError, radical_probe
from .paths import PathError, enumerate_paths, primitive_loops_at
from .reconstruct import reconstruct, verify_roundtrip

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

INPUT_ERRORS = (GraphError, PathError, AlgebraError, CharacterError, CorpusError, NestRepError, OSError)


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(t, (dict, list)) for t in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(t) for t in v) + "]"
    if isinstance(v, dict):
        return "{}"
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _emit(args, payload) -> None:
    if isinstance(payload, str):
        out = payload
    elif args.format == "text":
        out = "\n".join(_text(payload)) + "\n"
    else:
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        FsPath(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


# subcommands -----------------------------------------------------------------------


def cmd_parse(args) -> int:
    g = load_graph(args.graph)
    sinks, sources = classify_vertices(g)
    doc = graph_to_json(g)
    doc.update(
        n_vertices=len(g.vertices),
        n_edges=g.n_edges,
        sinks=sorted(sinks),
        sources=sorted(sources),
        loops={v: list(g.loop_edges_at(v)) for v in g.vertices if g.loop_edges_at(v)},
    )
    _emit(args, doc)
    return EXIT_OK


def cmd_paths(args) -> int:
    g = load_graph(args.graph)
    table = enumerate_paths(g, args.level)
    doc = {
        "level": args.level,
        "counts": table.level_counts(),
        "paths": [[w.text() for w in level] for level in table.by_length],
    }
    if args.loops_at:
        g.require_vertex(args.loops_at)
        doc["primitive_loops"] = [u.text() for u in primitive_loops_at(g, args.loops_at, args.level)]
    _emit(args, doc)
    return EXIT_OK


def cmd_fock(args) -> int:
    g = load_graph(args.graph)
    F = build_truncated_rep(g, args.level)
    if args.coo is not None:
        M = represent(parse_element(g, args.coo), F)
        _emit(args, coo_text(M))
        return EXIT_OK
    rel = verify_relations(F)
    _emit(args, {"level": args.level, "dim": F.dim, "relations": rel.to_json(), "norms": norm_table(g, F)})
    return EXIT_OK if rel.passed else EXIT_FAIL


def cmd_chars(args) -> int:
    g = load_graph(args.graph)
    doc: dict = {"ball_dims": {v: ball_dimension(g, v) for v in g.vertices}}
    if args.element is not None:
        if args.at is None:
            raise CharacterError("--element needs --at VERTEX")
        rho = character(g, args.at, args.lam)
        doc["character"] = rho.to_json()
        doc["value"] = str(eval_character(rho, parse_element(g, args.element)))
    _emit(args, doc)
    return EXIT_OK


def cmd_radical(args) -> int:
    g = load_graph(args.graph)
    probe = radical_probe(g, args.x, args.y, seed=args.seed)
    doc = probe.to_json()
    doc["passed"] = probe.count == probe.direct_count
    _emit(args, doc)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def cmd_reconstruct(args) -> int:
    g = load_graph(args.graph)
    R = reconstruct(g, seed=args.seed)
    rt = verify_roundtrip(g, probe_seed=args.seed)
    doc = R.to_json()
    doc["roundtrip"] = "pass" if rt.passed else "fail"
    doc["stages"] = rt.stages
    doc["witness"] = rt.witness.to_json() if rt.witness else None
    _emit(args, doc)
    return EXIT_OK if rt.passed else EXIT_FAIL


def cmd_corpus(args) -> int:
    if args.spec:
        spec = load_corpus_spec(args.spec)
        if args.level_set:
            spec.level = args.level
        if args.seed_set:
            spec.seed = args.seed
    else:
        spec = CorpusSpec(default_corpus(), seed=args.seed, level=args.level)
    spec.timings = args.timings
    report = run_corpus(spec)
    out = args.out or spec.report
    if args.format == "text":
        lines = [f"{r['name']}: {'pass' if r['passed'] else 'FAIL ' + '; '.join(r['failures'])}" for r in report["graphs"]]
        lines.append(f"overall: {'pass' if report['passed'] else 'FAIL'}")
        text = "\n".join(lines) + "\n"
    else:
        text = report_json(report)
    if out:
        FsPath(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_dot(args) -> int:
    g = load_graph(args.graph)
    target = reconstruct(g, seed=args.seed) if args.reconstructed else g
    _emit(args, emit_dot(target, name=FsPath(args.graph).stem))
    return EXIT_OK


# parser --------------------------------------------------------------------------------


class _Track(argparse.Action):
    """Store the value and remember that it was given explicitly."""

    def __call__(self, parser, ns, values, option_string=None):
        setattr(ns, self.dest, values)
        setattr(ns, self.dest + "_set", True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--level", "-k", type=int, default=4, action=_Track, help="truncation level (default 4)")
    common.add_argument("--seed", type=int, default=0, action=_Track, help="random seed (default 0)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", help="plain text output")
    common.add_argument("--out", "-o", help="write output to this file")
    common.set_defaults(format="json", level_set=False, seed_set=False)

    p = argparse.ArgumentParser(prog="quivalg", description="Tensor algebras of finite directed graphs.")
    p.add_argument("--version", action="version", version=f"quivalg {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", parents=[common], help="validate and summarize a graph file")
    s.add_argument("graph")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("paths", parents=[common], help="enumerate paths up to --level")
    s.add_argument("graph")
    s.add_argument("--loops-at", metavar="VERTEX", help="also list primitive loops at VERTEX")
    s.set_defaults(func=cmd_paths)

    s = sub.add_parser("fock", parents=[common], help="truncated Fock space: relations and norms")
    s.add_argument("graph")
    s.add_argument("--coo", metavar="ELEMENT", help="print the COO matrix of ELEMENT instead")
    s.set_defaults(func=cmd_fock)

    s = sub.add_parser("chars", parents=[common], help="ball dimensions and character values")
    s.add_argument("graph")
    s.add_argument("--element", metavar="ELEMENT", help='element text, e.g. "2·l1 + (1/2-i)·l2.l1"')
    s.add_argument("--at", metavar="VERTEX")
    s.add_argument("--lam", nargs="*", default=[], metavar="Z", help="loop parameters, e.g. 1/2 -i")
    s.set_defaults(func=cmd_chars)

    s = sub.add_parser("radical", parents=[common], help="count edges x -> y through the radical")
    s.add_argument("graph")
    s.add_argument("x")
    s.add_argument("y")
    s.set_defaults(func=cmd_radical)

    s = sub.add_parser("reconstruct", parents=[common], help="rebuild the graph from algebra probes")
    s.add_argument("graph")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("corpus", parents=[common], help="run every stage over a corpus")
    s.add_argument("spec", nargs="?", help="corpus spec JSON (default: built-in corpus)")
    s.add_argument("--timings", action="store_true", help="include per-graph timings (breaks byte-identity)")
    s.set_defaults(func=cmd_corpus)

    s = sub.add_parser("dot", parents=[common], help="DOT output")
    s.add_argument("graph")
    s.add_argument("--reconstructed", action="store_true", help="draw the reconstructed graph")
    s.set_defaults(func=cmd_dot)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        msg = exc.strerror if isinstance(exc, OSError) and exc.strerror else str(exc)
        where = f"{exc.filename}: " if isinstance(exc, OSError) and exc.filename else ""
        print(f"quivalg: error: {where}{msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Text and JSON serialization of graphs.

Text format, one record per line, '#' comments and blank lines ignored:

    n m {weighted|unweighted} p_v p_e
    u v [w]        (m edge lines; w required iff weighted)

Floats are written with repr() so a write/parse round trip reproduces
the graph exactly.
"""

from __future__ import annotations

import json
import os
from typing import IO

from .errors import GraphFormatError
from .graph import StochasticGraph

__all__ = [
    "parse_graph_file",
    "parse_graph_text",
    "write_graph_file",
    "graph_to_text",
    "graph_to_json",
    "graph_from_json",
]


def parse_graph_text(text: str, name: str = "<string>") -> StochasticGraph:
    """Parse the text graph format; errors carry 1-based line numbers."""
    records: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            records.append((lineno, line.split()))

    def fail(lineno: int, msg: str) -> GraphFormatError:
        return GraphFormatError(f"{name}, line {lineno}: {msg}")

    if not records:
        raise GraphFormatError(f"{name}: empty graph file")
    lineno, header = records[0]
    if len(header) != 5:
        raise fail(lineno, f"header needs 5 fields (n m kind p_v p_e), got {len(header)}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise fail(lineno, f"n and m must be integers, got {header[0]!r} {header[1]!r}") from None
    kind = header[2]
    if kind not in ("weighted", "unweighted"):
        raise fail(lineno, f"kind must be 'weighted' or 'unweighted', got {kind!r}")
    weighted = kind == "weighted"
    try:
        p_v, p_e = float(header[3]), float(header[4])
    except ValueError:
        raise fail(lineno, f"p_v and p_e must be floats, got {header[3]!r} {header[4]!r}") from None

    body = records[1:]
    if len(body) != m:
        raise GraphFormatError(f"{name}: header promises {m} edges, file has {len(body)}")
    edges = []
    want = 3 if weighted else 2
    for lineno, fields in body:
        if len(fields) != want:
            raise fail(lineno, f"{kind} edge line needs {want} fields, got {len(fields)}")
        try:
            u, v = int(fields[0]), int(fields[1])
            w = float(fields[2]) if weighted else 1.0
        except ValueError:
            raise fail(lineno, f"cannot parse edge line {' '.join(fields)!r}") from None
        edges.append((u, v, w))
    try:
        return StochasticGraph(n, tuple(edges), p_v, p_e, weighted)  # type: ignore[arg-type]
    except ValueError as exc:
        raise GraphFormatError(f"{name}: {exc}") from exc


def parse_graph_file(path: str | os.PathLike | IO[str]) -> StochasticGraph:
    """Parse a graph file (path or open text handle)."""
    if hasattr(path, "read"):
        return parse_graph_text(path.read(), getattr(path, "name", "<stream>"))
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read(), str(path))


def graph_to_text(g: StochasticGraph) -> str:
    kind = "weighted" if g.weighted else "unweighted"
    lines = [f"{g.n} {g.m} {kind} {g.p_v!r} {g.p_e!r}"]
    for e in g.edges:
        lines.append(f"{e.u} {e.v} {e.weight!r}" if g.weighted else f"{e.u} {e.v}")
    return "\n".join(lines) + "\n"


def write_graph_file(g: StochasticGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(graph_to_text(g))


def graph_to_json(g: StochasticGraph) -> dict:
    """JSON-friendly dict form, used inside artifact files."""
    return {
        "n": g.n,
        "p_v": g.p_v,
        "p_e": g.p_e,
        "weighted": g.weighted,
        "edges": [[e.u, e.v, e.weight] for e in g.edges],
    }


def graph_from_json(data: dict) -> StochasticGraph:
    try:
        return StochasticGraph(
            int(data["n"]),
            tuple((int(u), int(v), float(w)) for u, v, w in data["edges"]),  # type: ignore[arg-type]
            float(data["p_v"]),
            float(data["p_e"]),
            bool(data["weighted"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph JSON: {exc}") from exc


def load_json(path: str | os.PathLike) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(data: dict, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")

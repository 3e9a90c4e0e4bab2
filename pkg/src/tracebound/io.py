"""Text and JSON serialization of hypergraphs.

Text layout::

    r n m
    <m lines of r vertex ids>
    [vertices
    <one line of vertex ids>]      only when V is neither the edge span nor 0..n-1
    [classes
    <r lines, one class per line>]

Vertex ids inside an edge are sorted and edges are listed in lexicographic order,
so a write/read round trip is byte-exact.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .errors import DomainError
from .hypergraph import Hypergraph, PartitionedHypergraph, SimplicialComplex

Graph = Union[Hypergraph, PartitionedHypergraph]


def _split(g: Graph):
    if isinstance(g, PartitionedHypergraph):
        return g.base, g.classes
    return g, None


def dumps_text(g: Graph) -> str:
    base, classes = _split(g)
    lines = [f"{base.r} {base.v} {base.e}"]
    lines += [" ".join(map(str, e)) for e in base.sorted_edges]
    if classes is None:
        verts = sorted(base.vertices)
        if base.vertices != base.span and verts != list(range(len(verts))):
            lines += ["vertices", " ".join(map(str, verts))]
    else:
        lines.append("classes")
        lines += [" ".join(map(str, c)) for c in classes]
    return "\n".join(lines) + "\n"


def loads_text(text: str) -> Graph:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise DomainError("empty hypergraph file")
    try:
        r, n, m = (int(t) for t in rows[0].split())
        edges = [tuple(int(t) for t in rows[1 + k].split()) for k in range(m)]
    except (ValueError, IndexError) as exc:
        raise DomainError(f"malformed hypergraph text: {exc}") from None
    rest = rows[1 + m:]
    verts, classes = None, None
    while rest:
        tag = rest.pop(0)
        if tag == "vertices":
            verts = [int(t) for t in rest.pop(0).split()]
        elif tag == "classes":
            if len(rest) < r:
                raise DomainError("classes section needs one line per class")
            classes = [[int(t) for t in rest.pop(0).split()] for _ in range(r)]
        else:
            raise DomainError(f"unexpected section {tag!r}")
    if classes is not None:
        g = PartitionedHypergraph.build(classes, edges)
    else:
        if verts is None:
            span = {v for e in edges for v in e}
            verts = span if len(span) == n else span | set(range(n))
        g = Hypergraph(r, frozenset(edges), frozenset(verts))
    if g.v != n or g.e != m:
        raise DomainError(f"header says n={n}, m={m} but file holds n={g.v}, m={g.e}")
    return g


def to_json_obj(g: Graph) -> dict:
    base, classes = _split(g)
    obj = {
        "uniformity": base.r,
        "vertices": sorted(base.vertices),
        "edges": [list(e) for e in base.sorted_edges],
    }
    if classes is not None:
        obj["classes"] = [list(c) for c in classes]
    return obj


def from_json_obj(obj: dict) -> Graph:
    try:
        r = int(obj["uniformity"])
        edges = [tuple(e) for e in obj["edges"]]
        verts = obj.get("vertices")
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed hypergraph JSON: {exc}") from None
    if obj.get("classes") is not None:
        g = PartitionedHypergraph.build(obj["classes"], edges)
        if verts is not None and set(verts) != set(g.vertices):
            raise DomainError("vertices field disagrees with classes")
        return g
    return Hypergraph(r, frozenset(edges), None if verts is None else frozenset(verts))


def dumps_json(g: Graph) -> str:
    return json.dumps(to_json_obj(g), sort_keys=True) + "\n"


def loads_json(text: str) -> Graph:
    return from_json_obj(json.loads(text))


def read_graph(path: str | Path) -> Graph:
    path = Path(path)
    text = path.read_text()
    return loads_json(text) if path.suffix == ".json" else loads_text(text)


def write_graph(g: Graph, path: str | Path) -> None:
    path = Path(path)
    path.write_text(dumps_json(g) if path.suffix == ".json" else dumps_text(g))


def read_complex(path: str | Path) -> SimplicialComplex:
    g = read_graph(path)
    base = g.base if isinstance(g, PartitionedHypergraph) else g
    if base.e == 0:
        raise DomainError("complex file has no facets")
    return SimplicialComplex.from_hypergraph(base)

"""Line-oriented text formats for graphs, Sigma-systems, lists, vectors and colourings.

One document may mix several record kinds; '#' starts a comment.

    surface_chi <int> cellular <0|1>      embedding header
    rot <v>: <u1> ... <uk>                 circular neighbour order
    edge <u> <v> [id]                      simple graph edge, or multigraph edge with an id
    vertex <v>                             isolated vertex of a simple graph
    sigma <v>: <u1> ...                    Sigma(v); in a matching instance a single integer
    list <key>: <c1> ...                   colour list of a vertex or an edge id
    x <eid> <rational>   lam <eid> <real>  edge vectors
    col <key> <colour>                     colouring
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .graph_core import EmbeddedGraph, Multigraph, SimpleGraph
from .sigma import SigmaSystem


class FormatError(ValueError):
    pass


@dataclass
class Document:
    surface_chi: int | None = None
    cellular: bool | None = None
    rot: dict[int, list[int]] = field(default_factory=dict)
    edges: list[tuple[int, int, int | None]] = field(default_factory=list)
    vertices: list[int] = field(default_factory=list)
    sigma: dict[int, list[int]] = field(default_factory=dict)
    lists: dict[int, list[int]] = field(default_factory=dict)
    x: dict[int, Fraction] = field(default_factory=dict)
    lam: dict[int, float] = field(default_factory=dict)
    col: dict[int, int] = field(default_factory=dict)

    # -- views -----------------------------------------------------------------------------

    @property
    def is_embedded(self) -> bool:
        return self.surface_chi is not None

    @property
    def is_multigraph(self) -> bool:
        return bool(self.edges) and all(e[2] is not None for e in self.edges)

    def embedded(self) -> EmbeddedGraph:
        if not self.is_embedded:
            raise FormatError("document has no embedding header")
        return EmbeddedGraph.from_rotation(self.rot, self.surface_chi, self.cellular)

    def simple_graph(self) -> SimpleGraph:
        if self.is_embedded:
            return self.embedded().graph
        if any(e[2] is not None for e in self.edges):
            raise FormatError("edge ids present: this is a multigraph")
        verts = set(self.vertices) | {v for e in self.edges for v in e[:2]}
        return SimpleGraph(sorted(verts), [(u, v) for u, v, _ in self.edges])

    def multigraph(self) -> Multigraph:
        if not self.is_multigraph:
            raise FormatError("a multigraph needs ids on every edge line")
        verts = set(self.vertices) | {v for e in self.edges for v in e[:2]}
        return Multigraph(sorted(verts), self.edges)

    def sigma_system(self, g: SimpleGraph) -> SigmaSystem:
        return SigmaSystem(g, self.sigma)

    def sigma_sizes(self) -> dict[int, int]:
        out = {}
        for v, vals in self.sigma.items():
            if len(vals) != 1:
                raise FormatError(f"sigma {v}: a matching instance needs one integer")
            out[v] = vals[0]
        return out

    def list_assignment(self) -> dict[int, frozenset[int]]:
        return {k: frozenset(v) for k, v in self.lists.items()}


# -- parsing -----------------------------------------------------------------------------

def _ints(tokens, where: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"{where}: expected integers, got {' '.join(tokens)!r}") from None


def _keyed(rest: str, where: str) -> tuple[int, list[int]]:
    key, colon, tail = rest.partition(":")
    if not colon:
        raise FormatError(f"{where}: missing ':'")
    return _ints([key.strip()], where)[0], _ints(tail.split(), where)


def parse(text: str) -> Document:
    doc = Document()
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {no}"
        head, _, rest = line.partition(" ")
        toks = rest.split()
        if head == "surface_chi":
            if len(toks) != 3 or toks[1] != "cellular" or toks[2] not in ("0", "1"):
                raise FormatError(f"{where}: expected 'surface_chi <int> cellular <0|1>'")
            doc.surface_chi = _ints(toks[:1], where)[0]
            doc.cellular = toks[2] == "1"
        elif head == "rot":
            v, ns = _keyed(rest, where)
            if v in doc.rot:
                raise FormatError(f"{where}: rotation of {v} given twice")
            doc.rot[v] = ns
        elif head == "edge":
            if len(toks) not in (2, 3):
                raise FormatError(f"{where}: expected 'edge <u> <v> [id]'")
            vals = _ints(toks, where)
            doc.edges.append((vals[0], vals[1], vals[2] if len(vals) == 3 else None))
        elif head == "vertex":
            doc.vertices += _ints(toks, where)
        elif head in ("sigma", "list"):
            k, vals = _keyed(rest, where)
            target = doc.sigma if head == "sigma" else doc.lists
            if k in target:
                raise FormatError(f"{where}: {head} {k} given twice")
            target[k] = vals
        elif head in ("x", "lam", "col"):
            if len(toks) != 2:
                raise FormatError(f"{where}: expected '{head} <key> <value>'")
            k = _ints(toks[:1], where)[0]
            try:
                if head == "x":
                    doc.x[k] = Fraction(toks[1])
                elif head == "lam":
                    doc.lam[k] = float(toks[1])
                else:
                    doc.col[k] = int(toks[1])
            except ValueError:
                raise FormatError(f"{where}: bad value {toks[1]!r}") from None
        else:
            raise FormatError(f"{where}: unknown record {head!r}")
    return doc


def read(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# -- serialisation ----------------------------------------------------------------------------

def dumps(doc: Document) -> str:
    out = []
    if doc.surface_chi is not None:
        out.append(f"surface_chi {doc.surface_chi} cellular {int(bool(doc.cellular))}")
    for v, ns in doc.rot.items():
        out.append(f"rot {v}: " + " ".join(map(str, ns)) if ns else f"rot {v}:")
    for v in doc.vertices:
        out.append(f"vertex {v}")
    for u, v, eid in doc.edges:
        out.append(f"edge {u} {v}" if eid is None else f"edge {u} {v} {eid}")
    for name, table in (("sigma", doc.sigma), ("list", doc.lists)):
        for k, vals in table.items():
            out.append(f"{name} {k}: " + " ".join(map(str, vals)) if vals else f"{name} {k}:")
    out += [f"x {k} {v}" for k, v in doc.x.items()]
    out += [f"lam {k} {v!r}" for k, v in doc.lam.items()]
    out += [f"col {k} {v}" for k, v in doc.col.items()]
    return "\n".join(out) + "\n" if out else ""


def embedded_doc(g: EmbeddedGraph, s: SigmaSystem | None = None) -> Document:
    doc = Document(g.surface_chi, g.cellular, {v: list(g.rotation[v]) for v in g.vertices})
    if s is not None:
        doc.sigma = {v: sorted(s(v)) for v in g.vertices if s(v)}
    return doc


def graph_doc(g: SimpleGraph, s: SigmaSystem | None = None) -> Document:
    used = {v for e in g.edges() for v in e}
    doc = Document(edges=[(u, v, None) for u, v in g.edges()],
                   vertices=[v for v in g.vertices if v not in used])
    if s is not None:
        doc.sigma = {v: sorted(s(v)) for v in g.vertices if s(v)}
    return doc


def multigraph_doc(h: Multigraph, lists: Mapping[int, frozenset[int]] | None = None,
                   sigma: Mapping[int, int] | None = None) -> Document:
    used = {v for e in h.edges for v in (e.u, e.v)}
    doc = Document(edges=[(e.u, e.v, e.eid) for e in h.edges], vertices=[v for v in h.vertices if v not in used])
    if lists is not None:
        doc.lists = {eid: sorted(lists[eid]) for eid in h.edge_ids}
    if sigma is not None:
        doc.sigma = {v: [int(sigma[v])] for v in sorted(sigma)}
    return doc


def lists_doc(lists: Mapping[int, frozenset[int]]) -> Document:
    return Document(lists={k: sorted(lists[k]) for k in sorted(lists)})


def colouring_doc(col: Mapping[int, int]) -> Document:
    return Document(col=dict(sorted(col.items())))

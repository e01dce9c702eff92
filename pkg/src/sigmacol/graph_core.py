"""Simple graphs, multigraphs and combinatorial embeddings.

Embeddings are rotation systems: every vertex carries a circular order of its
neighbours.  Faces are traced with the rule ``next(u -> v) = (v -> succ_v(u))``
where ``succ_v`` is the successor in the rotation at ``v``.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from itertools import count
from typing import NamedTuple


class StructuralError(ValueError):
    """Raised when a graph or embedding is malformed."""


class PreconditionError(ValueError):
    """Raised when an operation is called outside its domain."""


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class SimpleGraph:
    """Immutable simple undirected graph on integer vertex ids."""

    __slots__ = ("_adj", "_vertices", "_m")

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()):
        adj: dict[int, set[int]] = {int(v): set() for v in vertices}
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise StructuralError(f"loop at vertex {u}")
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        self._vertices = tuple(sorted(adj))
        self._adj = {v: frozenset(adj[v]) for v in self._vertices}
        self._m = sum(len(a) for a in self._adj.values()) // 2

    @classmethod
    def from_adjacency(cls, adj: Mapping[int, Iterable[int]]) -> "SimpleGraph":
        edges = [(u, v) for u, nbrs in adj.items() for v in nbrs]
        g = cls(adj.keys(), edges)
        for u, nbrs in adj.items():
            if set(nbrs) != g._adj[u]:
                raise StructuralError(f"adjacency of {u} is not symmetric")
        return g

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return self._m

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def neighbours(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise KeyError(f"unknown vertex {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbours(v))

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self._vertices for v in self._adj[u] if u < v)

    def adjacency(self) -> dict[int, frozenset[int]]:
        return dict(self._adj)

    def induced(self, keep: Iterable[int]) -> "SimpleGraph":
        keep = set(keep)
        return SimpleGraph(
            [v for v in self._vertices if v in keep],
            [(u, v) for u, v in self.edges() if u in keep and v in keep],
        )

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "SimpleGraph":
        return SimpleGraph(self._vertices, self.edges() + [e for e in extra if e[0] != e[1]])

    def without_vertices(self, drop: Iterable[int]) -> "SimpleGraph":
        drop = set(drop)
        return self.induced(v for v in self._vertices if v not in drop)

    def contract(self, keep: int, gone: int) -> "SimpleGraph":
        """Contract edge ``keep``-``gone``; the merged vertex keeps the id ``keep``."""
        if not self.has_edge(keep, gone):
            raise PreconditionError(f"{keep}{gone} is not an edge")
        edges = []
        for u, v in self.edges():
            u2 = keep if u == gone else u
            v2 = keep if v == gone else v
            if u2 != v2:
                edges.append((u2, v2))
        return SimpleGraph([v for v in self._vertices if v != gone], edges)

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def components(self) -> list[list[int]]:
        seen: set[int] = set()
        comps = []
        for s in self._vertices:
            if s in seen:
                continue
            stack, comp = [s], []
            seen.add(s)
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimpleGraph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._vertices, tuple(self.edges())))

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, m={self.m})"


class MultiEdge(NamedTuple):
    u: int
    v: int
    eid: int

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


class Multigraph:
    """Immutable loopless multigraph; every edge carries a unique integer id."""

    __slots__ = ("_vertices", "_edges", "_by_id", "_inc")

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[tuple[int, int] | tuple[int, int, int]] = ()):
        vs = {int(v) for v in vertices}
        elist: list[MultiEdge] = []
        fresh = count()
        used: set[int] = set()
        raw = [tuple(int(t) for t in e) for e in edges]
        for e in raw:
            if len(e) == 3:
                used.add(e[2])
        for e in raw:
            u, v = e[0], e[1]
            if u == v:
                raise StructuralError(f"loop at vertex {u}")
            if len(e) == 3:
                eid = e[2]
            else:
                eid = next(fresh)
                while eid in used:
                    eid = next(fresh)
                used.add(eid)
            a, b = _edge_key(u, v)
            elist.append(MultiEdge(a, b, eid))
            vs.update((u, v))
        elist.sort(key=lambda e: e.eid)
        ids = [e.eid for e in elist]
        if len(set(ids)) != len(ids):
            raise StructuralError("edge ids must be unique")
        self._vertices = tuple(sorted(vs))
        self._edges = tuple(elist)
        self._by_id = {e.eid: e for e in elist}
        inc: dict[int, list[MultiEdge]] = {v: [] for v in self._vertices}
        for e in elist:
            inc[e.u].append(e)
            inc[e.v].append(e)
        self._inc = {v: tuple(es) for v, es in inc.items()}

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[MultiEdge, ...]:
        return self._edges

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e.eid for e in self._edges)

    def edge(self, eid: int) -> MultiEdge:
        return self._by_id[eid]

    def incident(self, v: int) -> tuple[MultiEdge, ...]:
        return self._inc[v]

    def degree(self, v: int) -> int:
        return len(self._inc[v])

    def max_degree(self) -> int:
        return max((len(es) for es in self._inc.values()), default=0)

    def max_multiplicity(self) -> int:
        mult: dict[tuple[int, int], int] = {}
        for e in self._edges:
            mult[(e.u, e.v)] = mult.get((e.u, e.v), 0) + 1
        return max(mult.values(), default=0)

    def edges_within(self, W: Iterable[int]) -> list[MultiEdge]:
        W = set(W)
        return [e for e in self._edges if e.u in W and e.v in W]

    def e_between(self, P: Iterable[int], Q: Iterable[int]) -> int:
        """Edges between P and Q; edges with both ends in P and Q count twice."""
        Q = set(Q)
        return sum(1 for p in set(P) for e in self._inc[p] if e.other(p) in Q)

    def cut_size(self, W: Iterable[int]) -> int:
        W = set(W)
        return sum(1 for e in self._edges if (e.u in W) != (e.v in W))

    def adjacent_edges(self, eid: int) -> set[int]:
        e = self._by_id[eid]
        return {f.eid for f in self._inc[e.u] + self._inc[e.v] if f.eid != eid}

    def subgraph_edges(self, eids: Iterable[int]) -> "Multigraph":
        keep = set(eids)
        return Multigraph(self._vertices, [tuple(e) for e in self._edges if e.eid in keep])

    def is_connected(self) -> bool:
        if not self._vertices:
            return True
        seen = {self._vertices[0]}
        stack = [self._vertices[0]]
        while stack:
            u = stack.pop()
            for e in self._inc[u]:
                w = e.other(u)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self._vertices)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Multigraph) and (self._vertices, self._edges) == (other._vertices, other._edges)

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        return f"Multigraph(n={len(self._vertices)}, m={len(self._edges)})"


@dataclass(frozen=True)
class Face:
    darts: tuple[tuple[int, int], ...]

    @property
    def degree(self) -> int:
        return len(self.darts)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(u for u, _ in self.darts)

    @property
    def order(self) -> int:
        return len(self.vertices)

    def walk(self) -> list[int]:
        return [u for u, _ in self.darts]


class EmbeddedGraph:
    """A simple graph with a rotation system and a declared surface.

    ``surface_chi`` is the Euler characteristic of the host surface and
    ``cellular`` declares that |V| - |E| + |F| equals it.
    """

    __slots__ = ("graph", "rotation", "surface_chi", "cellular", "_faces")

    def __init__(self, graph: SimpleGraph, rotation: Mapping[int, Iterable[int]],
                 surface_chi: int = 2, cellular: bool | None = True):
        """``cellular=None`` infers the flag from the Euler residual."""
        if surface_chi > 2:
            raise StructuralError("Euler characteristic of a surface is at most 2")
        rot = {}
        for v in graph.vertices:
            order = tuple(int(u) for u in rotation.get(v, ()))
            if len(order) != len(set(order)) or set(order) != graph.neighbours(v):
                bad = set(order) ^ graph.neighbours(v)
                raise StructuralError(f"rotation at {v} is not a permutation of N({v}); offending {sorted(bad)}")
            rot[v] = order
        extra = set(rotation) - set(graph.vertices)
        if extra:
            raise StructuralError(f"rotation given for unknown vertices {sorted(extra)}")
        self.graph = graph
        self.rotation = rot
        self.surface_chi = int(surface_chi)
        self._faces = trace_faces(self)
        residual = self.graph.n - self.graph.m + len(self._faces)
        self.cellular = residual == self.surface_chi if cellular is None else bool(cellular)
        if self.cellular and residual != self.surface_chi:
            raise StructuralError(f"declared cellular but |V|-|E|+|F| = {residual} != {self.surface_chi}")
        if residual < self.surface_chi:
            raise StructuralError(f"|V|-|E|+|F| = {residual} is below chi = {self.surface_chi}")

    @classmethod
    def from_rotation(cls, rotation: Mapping[int, Iterable[int]], surface_chi: int = 2,
                      cellular: bool = True) -> "EmbeddedGraph":
        rotation = {int(v): tuple(us) for v, us in rotation.items()}
        g = SimpleGraph.from_adjacency(rotation)
        return cls(g, rotation, surface_chi, cellular)

    @classmethod
    def on_own_surface(cls, graph: SimpleGraph, rotation: Mapping[int, Iterable[int]]) -> "EmbeddedGraph":
        """Cellular embedding on the orientable surface the rotation system defines (connected graphs)."""
        from types import SimpleNamespace

        rot = {v: tuple(rotation[v]) for v in graph.vertices}
        faces = trace_faces(SimpleNamespace(graph=graph, rotation=rot))
        return cls(graph, rot, graph.n - graph.m + len(faces), True)

    @classmethod
    def from_coordinates(cls, graph: SimpleGraph, pos: Mapping[int, tuple[float, float]]) -> "EmbeddedGraph":
        """Rotation read off a straight-line plane drawing (counter-clockwise)."""
        import math
        rot = {}
        for v in graph.vertices:
            x0, y0 = pos[v]
            rot[v] = tuple(sorted(graph.neighbours(v),
                                  key=lambda u: math.atan2(pos[u][1] - y0, pos[u][0] - x0)))
        return cls(graph, rot, 2, None)

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.graph.vertices

    def succ(self, v: int, u: int) -> int:
        r = self.rotation[v]
        return r[(r.index(u) + 1) % len(r)]

    def pred(self, v: int, u: int) -> int:
        r = self.rotation[v]
        return r[(r.index(u) - 1) % len(r)]

    def faces(self) -> list[Face]:
        if self._faces is None:
            self._faces = trace_faces(self)
        return self._faces

    def with_surface(self, surface_chi: int, cellular: bool) -> "EmbeddedGraph":
        return EmbeddedGraph(self.graph, self.rotation, surface_chi, cellular)

    def _rebuilt(self, rotation: dict[int, list[int]]) -> "EmbeddedGraph":
        g = SimpleGraph.from_adjacency({v: set(r) for v, r in rotation.items()})
        return EmbeddedGraph(g, rotation, self.surface_chi, None)

    def add_edge_at_corner(self, v: int, u1: int) -> "EmbeddedGraph":
        """Add the chord u1-u2 where u2 = succ_v(u1), inside the face through that corner."""
        u2 = self.succ(v, u1)
        if u1 == u2 or self.graph.has_edge(u1, u2):
            return self
        rot = {w: list(r) for w, r in self.rotation.items()}
        rot[u1].insert(rot[u1].index(v), u2)
        rot[u2].insert(rot[u2].index(v) + 1, u1)
        return self._rebuilt(rot)

    def contract(self, keep: int, gone: int) -> "EmbeddedGraph":
        """Contract the edge keep-gone, splicing rotations; parallel copies are dropped."""
        if not self.graph.has_edge(keep, gone):
            raise PreconditionError(f"{keep}{gone} is not an edge")
        rot = {w: list(r) for w, r in self.rotation.items()}
        rk, rg = rot[keep], rot[gone]
        i, j = rk.index(gone), rg.index(keep)
        around_keep = rk[i + 1:] + rk[:i]
        around_gone = rg[j + 1:] + rg[:j]
        present = set(around_keep)
        merged = around_keep + [w for w in around_gone if w not in present]
        for w in around_gone:
            rw = rot[w]
            if w in present:
                rw.remove(gone)
            else:
                rw[rw.index(gone)] = keep
        rot[keep] = merged
        del rot[gone]
        return self._rebuilt(rot)

    def delete_vertex(self, y: int) -> "EmbeddedGraph":
        rot = {w: [u for u in r if u != y] for w, r in self.rotation.items() if w != y}
        return self._rebuilt(rot)

    def delete_edge(self, a: int, b: int) -> "EmbeddedGraph":
        rot = {w: list(r) for w, r in self.rotation.items()}
        rot[a].remove(b)
        rot[b].remove(a)
        return self._rebuilt(rot)

    def suppress_through(self, y: int, x1: int, x2: int) -> "EmbeddedGraph":
        """Delete y, routing an edge x1-x2 along the path x1-y-x2 unless already present."""
        rot = {w: list(r) for w, r in self.rotation.items()}
        if x2 in rot[x1]:
            rot[x1].remove(y)
            rot[x2].remove(y)
        else:
            rot[x1][rot[x1].index(y)] = x2
            rot[x2][rot[x2].index(y)] = x1
        for z in rot.pop(y):
            if z not in (x1, x2):
                rot[z].remove(y)
        return self._rebuilt(rot)

    def restrict(self, keep: Iterable[int]) -> "EmbeddedGraph":
        keep = set(keep)
        rot = {w: [u for u in r if u in keep] for w, r in self.rotation.items() if w in keep}
        return self._rebuilt(rot)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, EmbeddedGraph) and self.graph == other.graph
                and self.surface_chi == other.surface_chi and self.cellular == other.cellular
                and all(_same_cycle(self.rotation[v], other.rotation[v]) for v in self.vertices))

    def __repr__(self) -> str:
        return f"EmbeddedGraph(n={self.graph.n}, m={self.graph.m}, chi={self.surface_chi})"


def _same_cycle(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    try:
        k = b.index(a[0])
    except ValueError:
        return False
    return tuple(b[k:] + b[:k]) == tuple(a)


def trace_faces(g: EmbeddedGraph) -> list[Face]:
    """Boundary walks of the embedding; an isolated vertex bounds one empty-walk face."""
    pos = {v: {u: i for i, u in enumerate(r)} for v, r in g.rotation.items()}
    for v, r in g.rotation.items():
        for u in r:
            if v not in pos.get(u, ()):
                raise StructuralError(f"rotation lists {u} at {v} but not {v} at {u}")
    seen: set[tuple[int, int]] = set()
    faces = []
    for v in g.graph.vertices:
        for u in g.rotation[v]:
            start = (v, u)
            if start in seen:
                continue
            walk = []
            dart = start
            while dart not in seen:
                seen.add(dart)
                walk.append(dart)
                a, b = dart
                rb = g.rotation[b]
                dart = (b, rb[(pos[b][a] + 1) % len(rb)])
            if dart != start:
                raise StructuralError("face tracing did not close up")
            faces.append(Face(tuple(walk)))
    faces.extend(Face(()) for v in g.graph.vertices if not g.rotation[v])
    return faces


def euler_residual(g: EmbeddedGraph) -> int:
    return g.graph.n - g.graph.m + len(trace_faces(g))


@dataclass(frozen=True)
class DegeneracyOrdering:
    order: tuple[int, ...]
    q: int

    def back_degrees(self, g: SimpleGraph) -> dict[int, int]:
        pos = {v: i for i, v in enumerate(self.order)}
        return {v: sum(1 for u in g.neighbours(v) if pos[u] < pos[v]) for v in self.order}


def degeneracy_ordering(g: SimpleGraph) -> DegeneracyOrdering:
    """Min-degree peel (ties by smallest id); the ordering is the reverse peel."""
    deg = {v: g.degree(v) for v in g.vertices}
    heap = [(d, v) for v, d in deg.items()]
    heapq.heapify(heap)
    removed: set[int] = set()
    peel = []
    q = 0
    while heap:
        d, v = heapq.heappop(heap)
        if v in removed or d != deg[v]:
            continue
        removed.add(v)
        peel.append(v)
        q = max(q, d)
        for u in g.neighbours(v):
            if u not in removed:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return DegeneracyOrdering(tuple(reversed(peel)), q)


def is_edge_maximal(g: EmbeddedGraph) -> bool:
    """True when every pair of rotation-consecutive neighbours is adjacent."""
    for v, r in g.rotation.items():
        if len(r) < 2:
            continue
        for i, u in enumerate(r):
            w = r[(i + 1) % len(r)]
            if not g.graph.has_edge(u, w):
                return False
    return True


def complete_to_edge_maximal(g: EmbeddedGraph) -> EmbeddedGraph:
    """Insert chords between consecutive rotation neighbours until none is missing."""
    if not g.graph.is_connected():
        raise PreconditionError("complete_to_edge_maximal needs a connected graph")
    cur = g
    changed = True
    while changed:
        changed = False
        for v in cur.vertices:
            i = 0
            while i < len(cur.rotation[v]):
                r = cur.rotation[v]
                u1, u2 = r[i], r[(i + 1) % len(r)]
                if len(r) >= 2 and u1 != u2 and not cur.graph.has_edge(u1, u2):
                    cur = cur.add_edge_at_corner(v, u1)
                    changed = True
                i += 1
    if cur is not g:
        cur = cur.with_surface(g.surface_chi, g.cellular)
    return cur

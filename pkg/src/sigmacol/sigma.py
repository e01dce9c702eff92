"""Sigma-systems, conflict graphs, Sigma-cliques and the extremal families."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .graph_core import EmbeddedGraph, PreconditionError, SimpleGraph, StructuralError

#: origin tag for a conflict coming from an edge of the host graph
ADJ = "adj"

#: Euler characteristic of the sphere
SPHERE_CHI = 2

#: clique bound constant for the sphere (beta_P = 11616, gamma_P = 76)
GAMMA_PLANE = 76


class SigmaSystem:
    """Map v -> Sigma(v), a subset of N(v), stored sparsely (only non-empty sets)."""

    __slots__ = ("host", "_sets", "beta")

    def __init__(self, host: SimpleGraph, sets: Mapping[int, Iterable[int]] | None = None):
        self.host = host
        clean: dict[int, frozenset[int]] = {}
        for v, members in (sets or {}).items():
            members = frozenset(int(u) for u in members)
            if v not in host:
                raise StructuralError(f"Sigma given for unknown vertex {v}")
            if not members <= host.neighbours(v):
                bad = sorted(members - host.neighbours(v))
                raise StructuralError(f"Sigma({v}) is not inside N({v}): {bad}")
            if members:
                clean[int(v)] = members
        self._sets = dict(sorted(clean.items()))
        self.beta = max((len(s) for s in self._sets.values()), default=0)

    @classmethod
    def empty(cls, host: SimpleGraph) -> "SigmaSystem":
        return cls(host, {})

    @classmethod
    def neighbourhoods(cls, host: SimpleGraph) -> "SigmaSystem":
        return cls(host, {v: host.neighbours(v) for v in host.vertices})

    def __call__(self, v: int) -> frozenset[int]:
        return self._sets.get(v, frozenset())

    def size(self, v: int) -> int:
        return len(self._sets.get(v, ()))

    @property
    def sets(self) -> dict[int, frozenset[int]]:
        return dict(self._sets)

    def holders(self, v: int) -> list[int]:
        """Vertices t with v in Sigma(t)."""
        return [t for t, s in self._sets.items() if v in s]

    def is_disjoint(self) -> bool:
        seen: set[int] = set()
        for s in self._sets.values():
            if seen & s:
                return False
            seen |= s
        return True

    def rehost(self, host: SimpleGraph) -> "SigmaSystem":
        return SigmaSystem(host, self._sets)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SigmaSystem) and self.host == other.host and self._sets == other._sets

    def __repr__(self) -> str:
        return f"SigmaSystem(nonempty={len(self._sets)}, beta={self.beta})"


@dataclass(frozen=True)
class ConflictGraph:
    base: SimpleGraph
    origin: dict[tuple[int, int], tuple]

    def degree(self, v: int) -> int:
        return self.base.degree(v)


def conflict_graph(g: SimpleGraph, s: SigmaSystem) -> ConflictGraph:
    if s.host != g:
        s = SigmaSystem(g, s.sets)
    origin: dict[tuple[int, int], list] = {}
    for u, v in g.edges():
        origin.setdefault((u, v), []).append(ADJ)
    for t, members in s.sets.items():
        ms = sorted(members)
        for i, a in enumerate(ms):
            for b in ms[i + 1:]:
                origin.setdefault((a, b), []).append(t)
    base = SimpleGraph(g.vertices, origin.keys())
    return ConflictGraph(base, {e: tuple(tags) for e, tags in sorted(origin.items())})


def square(g: SimpleGraph) -> SimpleGraph:
    """G^2 computed by a two-step breadth-first search from every vertex."""
    edges = []
    for v in g.vertices:
        dist = {v: 0}
        frontier = [v]
        for step in (1, 2):
            nxt = []
            for u in frontier:
                for w in g.neighbours(u):
                    if w not in dist:
                        dist[w] = step
                        nxt.append(w)
            frontier = nxt
        edges.extend((v, u) for u in dist if u > v)
    return SimpleGraph(g.vertices, edges)


def sigma_degree(g: SimpleGraph, s: SigmaSystem, v: int) -> int:
    if v not in g:
        raise KeyError(f"unknown vertex {v}")
    nbrs = set(g.neighbours(v))
    for t in s.holders(v):
        nbrs |= s(t)
    nbrs.discard(v)
    return len(nbrs)


def sigma_degree_bound(g: SimpleGraph, s: SigmaSystem, v: int) -> int:
    return g.degree(v) + sum(s.size(t) - 1 for t in s.holders(v))


# -- maximum clique ------------------------------------------------------------

@dataclass(frozen=True)
class CliqueResult:
    size: int
    witness: tuple[int, ...]
    exact: bool
    nodes: int = 0


class _Budget(Exception):
    pass


class _CliqueSearch:
    """Branch and bound with a greedy-colouring bound (bitset representation)."""

    def __init__(self, g: SimpleGraph, node_budget: int):
        self.verts = list(g.vertices)
        self.index = {v: i for i, v in enumerate(self.verts)}
        self.nbr = [0] * len(self.verts)
        for v in self.verts:
            m = 0
            for u in g.neighbours(v):
                m |= 1 << self.index[u]
            self.nbr[self.index[v]] = m
        self.budget = node_budget
        self.nodes = 0

    def _colour_bound(self, cand: int) -> list[tuple[int, int]]:
        # returns (vertex, colour) pairs in increasing colour order
        out = []
        colour = 0
        rest = cand
        while rest:
            colour += 1
            avail = rest
            while avail:
                low = avail & -avail
                i = low.bit_length() - 1
                rest &= ~low
                avail &= ~low
                avail &= ~self.nbr[i]
                out.append((i, colour))
        return out

    def max_clique(self, cand: int, target: int | None = None) -> list[int]:
        """Largest clique inside ``cand``; stops early once ``target`` is reached."""
        best: list[int] = []

        def expand(current: list[int], cand: int) -> bool:
            nonlocal best
            self.nodes += 1
            if self.nodes > self.budget:
                raise _Budget
            order = self._colour_bound(cand)
            for i, colour in reversed(order):
                if len(current) + colour <= len(best):
                    return False
                current.append(i)
                sub = cand & self.nbr[i]
                if sub:
                    if expand(current, sub):
                        return True
                elif len(current) > len(best):
                    best = list(current)
                    if target is not None and len(best) >= target:
                        return True
                current.pop()
                cand &= ~(1 << i)
            return False

        if cand:
            expand([], cand)
        return best


def max_clique(g: SimpleGraph, node_budget: int = 2_000_000) -> CliqueResult:
    """Exact maximum clique with the lexicographically least maximum witness."""
    if g.n == 0:
        return CliqueResult(0, (), True)
    search = _CliqueSearch(g, node_budget)
    full = (1 << g.n) - 1
    try:
        best = search.max_clique(full)
    except _Budget:
        lb = _greedy_clique(g)
        return CliqueResult(len(lb), lb, False, search.nodes)
    omega = len(best)
    # lexicographically least witness of size omega
    chosen: list[int] = []
    cand = full
    for i in range(g.n):
        if not (cand >> i) & 1:
            continue
        need = omega - len(chosen) - 1
        later = cand & search.nbr[i] & ~((1 << (i + 1)) - 1)
        try:
            ok = need == 0 or len(search.max_clique(later, target=need)) >= need
        except _Budget:
            return CliqueResult(omega, tuple(search.verts[j] for j in sorted(best)), True, search.nodes)
        if ok:
            chosen.append(i)
            cand = later
            if len(chosen) == omega:
                break
    return CliqueResult(omega, tuple(search.verts[j] for j in chosen), True, search.nodes)


def _greedy_clique(g: SimpleGraph) -> tuple[int, ...]:
    best: tuple[int, ...] = ()
    for start in g.vertices:
        clique = [start]
        cand = set(g.neighbours(start))
        while cand:
            v = max(sorted(cand), key=lambda u: len(g.neighbours(u) & cand))
            clique.append(v)
            cand &= g.neighbours(v)
        if len(clique) > len(best):
            best = tuple(sorted(clique))
    return best


def is_clique(g: SimpleGraph, vs: Iterable[int]) -> bool:
    vs = list(vs)
    return all(g.has_edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])


def sigma_clique_number(g: SimpleGraph, s: SigmaSystem, node_budget: int = 2_000_000) -> CliqueResult:
    return max_clique(conflict_graph(g, s).base, node_budget)


def clique_bound_violation(g: SimpleGraph, s: SigmaSystem, gamma: int = GAMMA_PLANE) -> int | None:
    """Excess of omega(G;Sigma) over (3/2) beta + gamma, or None when within the bound."""
    res = sigma_clique_number(g, s)
    excess = res.size - (1.5 * s.beta + gamma)
    return math.ceil(excess) if excess > 0 else None


# -- cyclic colouring ------------------------------------------------------------

@dataclass(frozen=True)
class CyclicInstance:
    graph: SimpleGraph
    sigma: SigmaSystem
    face_vertices: dict[int, int] = field(default_factory=dict)   # x_f id -> face index
    original: tuple[int, ...] = ()

    @property
    def delta_star(self) -> int:
        return self.sigma.beta


def cyclic_instance(g: EmbeddedGraph) -> CyclicInstance:
    """G_F: one new vertex per face, joined to (and Sigma-holding) that face's boundary."""
    from .graph_core import euler_residual

    if not g.cellular or euler_residual(g) != g.surface_chi:
        raise PreconditionError("cyclic_instance needs a cellular embedding")
    faces = g.faces()
    nxt = max(g.vertices, default=-1) + 1
    edges = list(g.graph.edges())
    sets = {}
    face_vertices = {}
    for k, f in enumerate(faces):
        xf = nxt + k
        face_vertices[xf] = k
        boundary = f.vertices
        edges.extend((xf, v) for v in boundary)
        sets[xf] = boundary
    graph = SimpleGraph(list(g.vertices) + list(face_vertices), edges)
    return CyclicInstance(graph, SigmaSystem(graph, sets), face_vertices, tuple(g.vertices))


def cyclic_clique_number(inst: CyclicInstance) -> CliqueResult:
    """omega*: largest set of original vertices pairwise sharing a face."""
    cg = conflict_graph(inst.graph, inst.sigma).base
    return max_clique(cg.induced(inst.original))


# -- generators --------------------------------------------------------------------

@dataclass(frozen=True)
class Family:
    name: str
    embedded: EmbeddedGraph
    sigma: SigmaSystem
    labels: dict[str, tuple[int, ...]]


def wegner(k: int) -> Family:
    """Planar graph with max degree 2k whose square has a clique of size 3k+1 (V minus z)."""
    if k < 2:
        raise PreconditionError("wegner needs k >= 2")
    x, y, z = 0, 1, 2
    A = tuple(range(3, 3 + k - 1))
    B = tuple(range(A[-1] + 1, A[-1] + 1 + k))
    C = tuple(range(B[-1] + 1, B[-1] + 1 + k))
    edges = [(x, y)]
    edges += [(x, a) for a in A] + [(y, a) for a in A]
    edges += [(x, b) for b in B] + [(z, b) for b in B]
    edges += [(y, c) for c in C] + [(z, c) for c in C]
    g = SimpleGraph(range(C[-1] + 1), edges)
    pos = {x: (0.0, 1.0), y: (0.0, -1.0), z: (3.0, 0.0)}
    for i, a in enumerate(A):
        pos[a] = (-1.0 - i, 0.0)
    for j, b in enumerate(B):
        pos[b] = (1.5, 0.2 + 0.6 * j)
    for j, c in enumerate(C):
        pos[c] = (1.5, -0.2 - 0.6 * j)
    emb = EmbeddedGraph.from_coordinates(g, pos)
    return Family(f"wegner({k})", emb, SigmaSystem.neighbourhoods(g),
                  {"x": (x,), "y": (y,), "z": (z,), "A": A, "B": B, "C": C})


def borodin(k: int) -> Family:
    """Subdivided triangular prism: 3k vertices, three faces of order 2k."""
    if k < 2:
        raise PreconditionError("borodin needs k >= 2")
    paths = {name: tuple(range(j * k, (j + 1) * k)) for j, name in enumerate("abc")}
    edges = []
    for p in paths.values():
        edges += list(zip(p, p[1:]))
    for i in (0, k - 1):
        a, b, c = (paths[n][i] for n in "abc")
        edges += [(a, b), (b, c), (c, a)]
    g = SimpleGraph(range(3 * k), edges)
    pos = {}
    for j, name in enumerate("abc"):
        theta = math.pi / 2 + j * 2 * math.pi / 3
        for i, v in enumerate(paths[name]):
            r = 1.0 + i
            pos[v] = (r * math.cos(theta), r * math.sin(theta))
    emb = EmbeddedGraph.from_coordinates(g, pos)
    return Family(f"borodin({k})", emb, SigmaSystem.empty(g), dict(paths))


def subdivided_complete(n: int) -> Family:
    """K_n with every edge subdivided once; Sigma(subdivision vertex) = its two neighbours."""
    if n < 4:
        raise PreconditionError("subdivided_complete needs n >= 4")
    branch = tuple(range(n))
    edges = []
    sets = {}
    subs = []
    nxt = n
    for i in range(n):
        for j in range(i + 1, n):
            edges += [(i, nxt), (nxt, j)]
            sets[nxt] = (i, j)
            subs.append(nxt)
            nxt += 1
    g = SimpleGraph(range(nxt), edges)
    rot = {v: tuple(sorted(g.neighbours(v))) for v in g.vertices}
    emb = EmbeddedGraph.on_own_surface(g, rot)
    return Family(f"subdivided_complete({n})", emb, SigmaSystem(g, sets),
                  {"branch": branch, "subdivision": tuple(subs)})


def gen_family(name: str, k: int) -> Family:
    try:
        maker = {"wegner": wegner, "borodin": borodin, "subdivided_complete": subdivided_complete}[name]
    except KeyError:
        raise PreconditionError(f"unknown family {name!r}") from None
    return maker(k)


# -- colouring checks ------------------------------------------------------------

@dataclass(frozen=True)
class Conflict:
    u: int
    v: int
    colour: int
    origin: tuple          # ADJ and/or the vertices t with u, v in Sigma(t)

    def __str__(self) -> str:
        why = ", ".join("adjacent" if o == ADJ else f"both in Sigma({o})" for o in self.origin)
        return f"{self.u} and {self.v} share colour {self.colour} ({why})"


def find_conflicts(g: SimpleGraph, s: SigmaSystem, colouring: Mapping[int, int],
                   lists: Mapping[int, Iterable[int]] | None = None) -> list[Conflict | str]:
    """Every violated constraint among coloured vertices (missing vertices are ignored)."""
    out: list[Conflict | str] = []
    if lists is not None:
        for v, c in sorted(colouring.items()):
            if v in lists and c not in set(lists[v]):
                out.append(f"colour {c} of {v} is not in its list")
    cg = conflict_graph(g, s)
    for (u, v), tags in cg.origin.items():
        if u in colouring and v in colouring and colouring[u] == colouring[v]:
            out.append(Conflict(u, v, colouring[u], tags))
    return out

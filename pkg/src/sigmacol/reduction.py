"""From an S3 structure to a list edge-colouring instance on a multigraph, and back."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .discharge import EXHAUSTIVE_LIMIT, StructureWitness, validate_witness
from .graph_core import EmbeddedGraph, Multigraph, PreconditionError, SimpleGraph
from .sigma import SigmaSystem, find_conflicts


class ReductionError(ValueError):
    """The witness cannot be reduced (invalid, or some y is missing from the Sigma set of its X neighbour)."""


class InvariantError(RuntimeError):
    """An internal guarantee was broken; indicates a bug rather than bad input."""


CHORD, CONTRACT1, CONTRACT2 = "chord", "contract1", "contract2"


@dataclass(frozen=True)
class Move:
    kind: str
    y: int
    x: tuple[int, int]
    u: int | None                      # contraction target
    u2: int | None                     # second outside neighbour (contract2)
    y_nbrs: frozenset[int]             # neighbourhood of y just before the move
    added: tuple[tuple[int, int], ...]  # edges the move created


@dataclass
class ReducedInstance:
    g0: SimpleGraph
    sigma0: SigmaSystem
    trace: list[Move]
    embedded0: EmbeddedGraph | None = None

    def replay(self) -> SimpleGraph:
        """Undo every move, recovering the original graph."""
        adj = {v: set(ns) for v, ns in self.g0.adjacency().items()}
        for mv in reversed(self.trace):
            for a, b in mv.added:
                adj[a].discard(b)
                adj[b].discard(a)
            adj[mv.y] = set(mv.y_nbrs)
            for w in mv.y_nbrs:
                adj.setdefault(w, set()).add(mv.y)
        return SimpleGraph.from_adjacency(adj)


def uncovered_y(s: SigmaSystem, w: StructureWitness) -> list[int]:
    """Vertices y of Y with y missing from Sigma(x1) or Sigma(x2)."""
    return [y for y in sorted(w.Y) if any(y not in s(x) for x in w.xy[y])]


def outside_neighbours(g: SimpleGraph, y: int, w: StructureWitness) -> list[int]:
    return sorted(g.neighbours(y) - w.X - w.Y)


def build_reduced_instance(g: EmbeddedGraph | SimpleGraph, s: SigmaSystem, w: StructureWitness,
                           beta: int) -> ReducedInstance:
    emb = g if isinstance(g, EmbeddedGraph) else None
    sg = g.graph if emb is not None else g
    if w.kind != "S3" or not w.Y:
        raise ReductionError("not a reducible witness: need an S3 structure with Y non-empty")
    report = validate_witness(sg, w)
    if not report.valid:
        raise ReductionError(f"not a reducible witness: {report}")
    missing = uncovered_y(s, w)
    if missing:
        raise ReductionError(f"not a reducible witness: Y vertices outside their hub Sigma sets: {missing}")

    adj = {v: set(ns) for v, ns in sg.adjacency().items()}
    sig = {v: set(s(v)) for v in sg.vertices}
    full: set[int] = set()     # vertices whose final Sigma is their whole neighbourhood
    trace: list[Move] = []

    def contract(y: int, u: int) -> list[tuple[int, int]]:
        added = []
        for z in adj.pop(y):
            adj[z].discard(y)
            if z != u and z not in adj[u]:
                adj[z].add(u)
                adj[u].add(z)
                added.append((min(u, z), max(u, z)))
        return added

    groups = {0: [], 1: [], 2: []}
    for y in sorted(w.Y):
        k = len(outside_neighbours(sg, y, w))
        if k > 2:
            raise ReductionError(f"{y} has {k} neighbours outside X and Y")
        groups[k].append(y)

    for y in groups[0]:
        x1, x2 = w.xy[y]
        before = frozenset(adj[y])
        added = []
        for z in adj.pop(y):
            adj[z].discard(y)
        if x2 not in adj[x1]:
            adj[x1].add(x2)
            adj[x2].add(x1)
            added.append((x1, x2))
        sig[x1].discard(y)
        sig[x2].discard(y)
        sig[x1].add(x2)
        sig[x2].add(x1)
        trace.append(Move(CHORD, y, (x1, x2), None, None, before, tuple(added)))
        if emb is not None:
            emb = emb.suppress_through(y, x1, x2)

    for y in groups[1]:
        x1, x2 = w.xy[y]
        (u,) = outside_neighbours(sg, y, w)
        before = frozenset(adj[y])
        added = contract(y, u)
        sig[x1].discard(y)
        sig[x2].discard(y)
        full.add(u)
        trace.append(Move(CONTRACT1, y, (x1, x2), u, None, before, tuple(added)))
        if emb is not None:
            emb = emb.contract(u, y)

    for y in groups[2]:
        x1, x2 = w.xy[y]
        u, u2 = outside_neighbours(sg, y, w)
        before = frozenset(adj[y])
        added = contract(y, u)
        sig[x1].discard(y)
        sig[x2].discard(y)
        sig[u2].discard(y)
        sig[u2].add(u)
        full.add(u)
        trace.append(Move(CONTRACT2, y, (x1, x2), u, u2, before, tuple(added)))
        if emb is not None:
            emb = emb.contract(u, y)

    Y = w.Y
    g0 = SimpleGraph.from_adjacency(adj)
    sets = {}
    for v in g0.vertices:
        if v in full:
            sets[v] = g0.neighbours(v)
        else:
            sets[v] = frozenset(sig[v] - Y)
    sigma0 = SigmaSystem(g0, sets)
    over = [v for v in g0.vertices if sigma0.size(v) > beta]
    if over:
        raise InvariantError(f"|Sigma0| exceeds beta={beta} at {over}")
    if emb is not None and emb.graph != g0:
        raise InvariantError("embedded reduction disagrees with the abstract one")
    return ReducedInstance(g0, sigma0, trace, emb)


# -- the multigraph H ----------------------------------------------------------------

@dataclass
class MatchingInstance:
    h: Multigraph
    lists: dict[int, frozenset[int]]
    sigma: dict[int, int]
    origin: dict[int, int]
    bound_ok: dict[int, bool] = field(default_factory=dict)
    density_ok: bool | None = None
    density_mode: str = "exhaustive"

    @property
    def X(self) -> tuple[int, ...]:
        return self.h.vertices


def forbidden_vertices(g: SimpleGraph, s: SigmaSystem, w: StructureWitness, y: int) -> frozenset[int]:
    """{x1,x2} u ((Z u N(Z)) \\ Y) u ((Sigma(x1) u Sigma(x2)) \\ Y), Z the non-X neighbours of y."""
    x1, x2 = w.xy[y]
    Z = g.neighbours(y) - w.X
    nz = set(Z)
    for z in Z:
        nz |= g.neighbours(z)
    return frozenset({x1, x2} | (nz - w.Y) | ((s(x1) | s(x2)) - w.Y))


def density_holds(h: Multigraph, sigma: Mapping[int, int], zeta: int) -> tuple[bool, str]:
    """sum_{w in W} (sigma(w) - d_H(w)) <= e_H(W, X\\W) + zeta |W| for all non-empty W."""
    xs = list(h.vertices)
    n = len(xs)
    if n == 0:
        return True, "exhaustive"
    idx = {x: i for i, x in enumerate(xs)}
    m = np.zeros((n, n), dtype=np.int64)
    for e in h.edges:
        m[idx[e.u], idx[e.v]] += 1
        m[idx[e.v], idx[e.u]] += 1
    deg = m.sum(axis=1)
    # violation margin = sum(sigma - d - zeta) - cut = sum(sigma - 2d - zeta) + 2 m_in
    wgt = np.array([sigma[x] for x in xs], dtype=np.int64) - 2 * deg - zeta
    if n <= EXHAUSTIVE_LIMIT:
        f = np.zeros(1, dtype=np.int64)
        for k in range(n):
            inner = np.zeros(1, dtype=np.int64)
            for j in range(k):
                inner = np.concatenate([inner, inner + m[k, j]])
            f = np.concatenate([f, f + wgt[k] + 2 * inner])
        return bool((f[1:] <= 0).all()), "exhaustive"
    rng = np.random.default_rng(0)
    for _ in range(4096):
        pick = rng.random(n) < 0.5
        if pick.any() and wgt[pick].sum() + m[np.ix_(pick, pick)].sum() > 0:
            return False, "sampled"
    return True, "sampled"


def build_matching_instance(g: SimpleGraph | EmbeddedGraph, s: SigmaSystem, w: StructureWitness,
                            partial: Mapping[int, int], lists: Mapping[int, Iterable[int]],
                            zeta: int | None = None) -> MatchingInstance:
    sg = g.graph if isinstance(g, EmbeddedGraph) else g
    stray = sorted(set(partial) & w.Y)
    if stray:
        raise PreconditionError(f"partial colouring touches Y at {stray}")
    bad = find_conflicts(sg, s, partial, lists)
    if bad:
        raise PreconditionError(f"invalid partial colouring: {bad[0]}")
    h = Multigraph(w.X, [(*w.xy[y], y) for y in sorted(w.Y)])
    sigma = {x: s.size(x) for x in w.X}
    out_lists, origin, bound_ok = {}, {}, {}
    for y in sorted(w.Y):
        used = {partial[v] for v in forbidden_vertices(sg, s, w, y) if v in partial}
        lst = frozenset(lists[y]) - used
        out_lists[y] = lst
        origin[y] = y
        x1, x2 = w.xy[y]
        need = len(set(lists[y])) - 10 - (sigma[x1] - h.degree(x1)) - (sigma[x2] - h.degree(x2))
        bound_ok[y] = len(lst) >= need
    if not all(bound_ok.values()):
        raise InvariantError(f"list-size bound fails on edges {[e for e, ok in bound_ok.items() if not ok]}")
    dens, mode = density_holds(h, sigma, w.zeta if zeta is None else zeta)
    return MatchingInstance(h, out_lists, sigma, origin, bound_ok, dens, mode)


def extend_colouring(partial: Mapping[int, int], h_colouring: Mapping[int, int], origin: Mapping[int, int],
                     g: SimpleGraph | EmbeddedGraph | None = None, s: SigmaSystem | None = None,
                     lists: Mapping[int, Iterable[int]] | None = None) -> dict[int, int]:
    """Give every y the colour of e_y; validate against G when it is supplied."""
    total = dict(partial)
    for eid, colour in h_colouring.items():
        total[origin[eid]] = colour
    if g is not None and s is not None:
        sg = g.graph if isinstance(g, EmbeddedGraph) else g
        bad = find_conflicts(sg, s, total, lists)
        if bad:
            raise InvariantError(f"extension conflict: {bad[0]}")
    return dict(sorted(total.items()))

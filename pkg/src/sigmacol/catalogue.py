"""Fixed test families and seeded random instance generators."""

from __future__ import annotations

import math
import random
from itertools import combinations, product

from .graph_core import EmbeddedGraph, Multigraph, SimpleGraph, complete_to_edge_maximal
from .sigma import SigmaSystem


# -- small multigraphs -------------------------------------------------------------------

def shannon_triangle(mu: int) -> Multigraph:
    return Multigraph(range(3), [(0, 1), (1, 2), (0, 2)] * mu)


def _named() -> dict[str, list[tuple[int, int]]]:
    k4 = list(combinations(range(4), 2))
    return {
        "K2": [(0, 1)],
        "K2x2": [(0, 1)] * 2,
        "K2x3": [(0, 1)] * 3,
        "K2x5": [(0, 1)] * 5,
        "P3": [(0, 1), (1, 2)],
        "P3 doubled": [(0, 1), (0, 1), (1, 2), (1, 2)],
        "K3": [(0, 1), (1, 2), (0, 2)],
        "K3 x2": [(0, 1), (1, 2), (0, 2)] * 2,
        "K3 plus one": [(0, 1), (1, 2), (0, 2), (0, 1)],
        "P4": [(0, 1), (1, 2), (2, 3)],
        "C4": [(0, 1), (1, 2), (2, 3), (0, 3)],
        "C4 x2": [(0, 1), (1, 2), (2, 3), (0, 3)] * 2,
        "K1,3": [(0, 1), (0, 2), (0, 3)],
        "paw": [(0, 1), (1, 2), (0, 2), (2, 3)],
        "diamond": [(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)],
        "K4": k4,
        "K4 plus two": k4 + [(0, 1), (2, 3)],
        "P5": [(0, 1), (1, 2), (2, 3), (3, 4)],
        "C5": [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)],
        "C5 plus chord": [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)],
        "K1,4": [(0, 1), (0, 2), (0, 3), (0, 4)],
        "bowtie": [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)],
        "house": [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4)],
        "W4": [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)],
        "K5 minus two": [e for e in combinations(range(5), 2) if e not in ((0, 1), (2, 3))],
        "C5 x2 partial": [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 1), (2, 3)],
        "bull": [(0, 1), (1, 2), (0, 2), (1, 3), (2, 4)],
        "K2,3": [(a, b) for a in (0, 1) for b in (2, 3, 4)],
    }


def multigraph_catalogue(seed: int = 2024, size: int = 60) -> list[tuple[str, Multigraph]]:
    """Connected loopless multigraphs on at most 5 vertices with at most 8 edges."""
    out = [(name, Multigraph(sorted({v for e in es for v in e}), es)) for name, es in _named().items()]
    rng = random.Random(seed)
    seen = {tuple(sorted((e.u, e.v) for e in h.edges)) for _, h in out}
    while len(out) < size:
        n = rng.randint(2, 5)
        m = rng.randint(n - 1, 8)
        edges = [(rng.randrange(i), i) for i in range(1, n)]        # spanning tree keeps it connected
        while len(edges) < m:
            a, b = rng.sample(range(n), 2)
            edges.append((min(a, b), max(a, b)))
        key = tuple(sorted(edges))
        if key in seen:
            continue
        seen.add(key)
        out.append((f"random-{len(out)}", Multigraph(range(n), edges)))
    return out


# -- embedded graphs -------------------------------------------------------------------------

def random_tree_embedding(n: int, rng: random.Random) -> EmbeddedGraph:
    """Random recursive tree with a random rotation; every tree rotation is planar."""
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    g = SimpleGraph(range(n), edges)
    rot = {}
    for v in g.vertices:
        ns = sorted(g.neighbours(v))
        rng.shuffle(ns)
        rot[v] = ns
    return EmbeddedGraph(g, rot, 2, True)


def random_planar_embedding(n: int, rng: random.Random, chords: int | None = None) -> EmbeddedGraph:
    """Tree plus random corner chords: connected and planar, anywhere between sparse and maximal."""
    emb = random_tree_embedding(n, rng)
    chords = rng.randint(0, 2 * n) if chords is None else chords
    for _ in range(chords):
        v = rng.randrange(n)
        if emb.graph.degree(v) < 2:
            continue
        u = rng.choice(emb.rotation[v])
        emb = emb.add_edge_at_corner(v, u)
    return emb


def random_maximal_planar(n: int, rng: random.Random) -> EmbeddedGraph:
    return complete_to_edge_maximal(random_planar_embedding(n, rng))


def bipyramid(m: int) -> EmbeddedGraph:
    """Hubs 0 and 1 joined to every vertex of the ring 2..m+1."""
    ring = list(range(2, 2 + m))
    rot = {0: ring, 1: ring[::-1]}
    for i, r in enumerate(ring):
        rot[r] = [0, ring[i - 1], 1, ring[(i + 1) % m]]
    return EmbeddedGraph.from_rotation(rot)


def stacked_bipyramid(m: int) -> EmbeddedGraph:
    """Bipyramid with one extra vertex stacked into the face 0, 2, 3; still a triangulation."""
    g = bipyramid(m)
    rot = {v: list(r) for v, r in g.rotation.items()}
    w = m + 2
    for v, after in ((0, 2), (2, 3), (3, 0)):
        rot[v].insert(rot[v].index(after) + 1, w)
    rot[w] = [0, 2, 3]
    return EmbeddedGraph.from_rotation(rot)


def wheel(m: int) -> EmbeddedGraph:
    """Hub 0 joined to the cycle 1..m; every rim vertex has a single big neighbour once m exceeds zeta."""
    ring = list(range(1, m + 1))
    rot = {0: ring}
    for i, r in enumerate(ring):
        rot[r] = [0, ring[i - 1], ring[(i + 1) % m]]
    return EmbeddedGraph.from_rotation(rot)


def _polyhedron_points(name: str) -> list[tuple[float, float, float]]:
    phi = (1 + math.sqrt(5)) / 2
    cyc = lambda p: [p, (p[1], p[2], p[0]), (p[2], p[0], p[1])]
    if name == "tetrahedron":
        return [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    if name == "octahedron":
        return [q for p in ((1, 0, 0), (-1, 0, 0)) for q in cyc(p)]
    if name == "cube":
        return list(product((-1, 1), repeat=3))
    if name == "icosahedron":
        return [q for a, b in product((-1, 1), repeat=2) for q in cyc((0, a, b * phi))]
    if name == "dodecahedron":
        pts = list(product((-1, 1), repeat=3))
        return pts + [q for a, b in product((-1, 1), repeat=2) for q in cyc((0, a / phi, b * phi))]
    raise ValueError(f"unknown polyhedron {name!r}")


def polyhedron(name: str) -> EmbeddedGraph:
    """Platonic solid: edges join nearest vertex pairs, rotations read counter-clockwise from outside."""
    pts = _polyhedron_points(name)
    d2 = lambda p, q: sum((a - b) ** 2 for a, b in zip(p, q))
    shortest = min(d2(p, q) for p, q in combinations(pts, 2))
    edges = [(i, j) for (i, p), (j, q) in combinations(enumerate(pts), 2) if abs(d2(p, q) - shortest) < 1e-9]
    g = SimpleGraph(range(len(pts)), edges)
    rot = {}
    for v, p in enumerate(pts):
        n = [c / math.sqrt(d2(p, (0, 0, 0))) for c in p]
        # orthonormal frame (e1, e2) of the tangent plane at p, with e1 x e2 = n
        ref = (1.0, 0.0, 0.0) if abs(n[0]) < 0.9 else (0.0, 1.0, 0.0)
        dot = sum(a * b for a, b in zip(ref, n))
        e1 = [r - dot * c for r, c in zip(ref, n)]
        norm = math.sqrt(sum(c * c for c in e1))
        e1 = [c / norm for c in e1]
        e2 = [n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]]

        def angle(u: int) -> float:
            d = [a - b for a, b in zip(pts[u], p)]
            return math.atan2(sum(a * b for a, b in zip(d, e2)), sum(a * b for a, b in zip(d, e1)))

        rot[v] = sorted(g.neighbours(v), key=angle)
    return EmbeddedGraph(g, rot, 2, True)


# -- Sigma systems and lists -------------------------------------------------------------------------

def random_sigma(g: SimpleGraph, rng: random.Random, p: float = 0.5) -> SigmaSystem:
    return SigmaSystem(g, {v: [u for u in sorted(g.neighbours(v)) if rng.random() < p] for v in g.vertices})


def random_disjoint_sigma(g: SimpleGraph, rng: random.Random, p: float = 0.6) -> SigmaSystem:
    """Sigma-sets that are pairwise disjoint: every vertex joins at most one holder's set."""
    taken: set[int] = set()
    sets = {}
    order = list(g.vertices)
    rng.shuffle(order)
    for v in order:
        pick = [u for u in sorted(g.neighbours(v)) if u not in taken and rng.random() < p]
        taken.update(pick)
        sets[v] = pick
    return SigmaSystem(g, sets)


def random_degenerate_graph(n: int, q: int, rng: random.Random) -> SimpleGraph:
    """Each new vertex picks at most q earlier neighbours, so the graph is q-degenerate."""
    edges = []
    for i in range(1, n):
        k = rng.randint(1, min(q, i))
        edges += [(j, i) for j in rng.sample(range(i), k)]
    return SimpleGraph(range(n), edges)


def uniform_lists(vertices, k: int, offset: int = 0) -> dict[int, frozenset[int]]:
    return {v: frozenset(range(offset, offset + k)) for v in vertices}


def random_lists(vertices, k: int, palette: int, rng: random.Random) -> dict[int, frozenset[int]]:
    return {v: frozenset(rng.sample(range(palette), k)) for v in vertices}

"""Greedy and exact Sigma-colouring, and the structural pipeline that ties everything together."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .discharge import detect_structure, zeta_star
from .graph_core import (DegeneracyOrdering, EmbeddedGraph, SimpleGraph, complete_to_edge_maximal,
                         degeneracy_ordering)
from .kahn import BudgetExceeded as EdgeBudget
from .kahn import KahnParams, exact_list_edge_colouring, run as kahn_run
from .reduction import (InvariantError, ReductionError, build_matching_instance, build_reduced_instance,
                        uncovered_y, extend_colouring)
from .sigma import SigmaSystem, conflict_graph, max_clique

Lists = Mapping[int, Iterable[int]]


class BudgetExceeded(RuntimeError):
    pass


# -- validation -------------------------------------------------------------------------------

def colouring_problems(g: SimpleGraph, s: SigmaSystem, colouring: Mapping[int, int],
                       lists: Lists | None = None) -> list[str]:
    """Direct check of the definition: lists, edges, and every Sigma(t) rainbow."""
    out = []
    for v in g.vertices:
        if v not in colouring:
            out.append(f"vertex {v} uncoloured")
        elif lists is not None and colouring[v] not in set(lists[v]):
            out.append(f"colour {colouring[v]} of {v} not in its list")
    for u, v in g.edges():
        if u in colouring and v in colouring and colouring[u] == colouring[v]:
            out.append(f"adjacent {u} and {v} share colour {colouring[u]}")
    for t, members in s.sets.items():
        seen: dict[int, int] = {}
        for v in sorted(members):
            c = colouring.get(v)
            if c is None:
                continue
            if c in seen:
                out.append(f"{seen[c]} and {v} both in Sigma({t}) share colour {c}")
            seen[c] = v
    return out


@dataclass
class Colouring:
    assignment: dict[int, int]
    valid: bool
    problems: list[str] = field(default_factory=list)

    @classmethod
    def checked(cls, g: SimpleGraph, s: SigmaSystem, assignment: Mapping[int, int],
                lists: Lists | None = None) -> "Colouring":
        problems = colouring_problems(g, s, assignment, lists)
        return cls(dict(sorted(assignment.items())), not problems, problems)

    @property
    def colours_used(self) -> int:
        return len(set(self.assignment.values()))


# -- greedy ---------------------------------------------------------------------------------------

@dataclass
class GreedyResult:
    success: bool
    colouring: dict[int, int]
    failed_at: int | None = None


def greedy_sigma_colouring(g: SimpleGraph, s: SigmaSystem, lists: Lists,
                           order: DegeneracyOrdering | Iterable[int] | None = None) -> GreedyResult:
    """Colour along the ordering, each vertex taking its least list colour not used by a coloured Sigma-neighbour."""
    if order is None:
        order = degeneracy_ordering(g)
    seq = order.order if isinstance(order, DegeneracyOrdering) else tuple(order)
    cg = conflict_graph(g, s).base
    col: dict[int, int] = {}
    for v in seq:
        used = {col[u] for u in cg.neighbours(v) if u in col}
        free = sorted(set(lists[v]) - used)
        if not free:
            return GreedyResult(False, col, v)
        col[v] = free[0]
    return GreedyResult(True, col)


# -- exact -------------------------------------------------------------------------------------------

EXACT_LIMIT = 40


def _greedy_cliques(cg: SimpleGraph) -> list[tuple[int, ...]]:
    """One maximal clique grown greedily from each vertex, duplicates dropped."""
    out: set[tuple[int, ...]] = set()
    for v in cg.vertices:
        clique, cand = [v], set(cg.neighbours(v))
        while cand:
            u = max(cand, key=lambda w: (len(cand & set(cg.neighbours(w))), -w))
            clique.append(u)
            cand &= set(cg.neighbours(u))
        if len(clique) > 2:
            out.add(tuple(sorted(clique)))
    return sorted(out)


def _clique_matchable(clique, free: Mapping[int, list[int]]) -> bool:
    """Hall check: the uncoloured clique vertices get distinct colours from their free lists."""
    owner: dict[int, int] = {}

    def augment(v: int, seen: set[int]) -> bool:
        for c in free[v]:
            if c in seen:
                continue
            seen.add(c)
            if c not in owner or augment(owner[c], seen):
                owner[c] = v
                return True
        return False

    return all(augment(v, set()) for v in clique)


def _dsatur(cg: SimpleGraph, lists: Mapping[int, list[int]], budget: int) -> dict[int, int] | None:
    """Backtracking list colouring, most constrained vertex first, pruned by a matching test on cliques."""
    nb = {v: cg.neighbours(v) for v in cg.vertices}
    cliques = _greedy_cliques(cg)
    col: dict[int, int] = {}
    nodes = 0

    def hall_ok() -> bool:
        free = {}
        for clique in cliques:
            rest = [v for v in clique if v not in col]
            for v in rest:
                if v not in free:
                    used = {col[u] for u in nb[v] if u in col}
                    free[v] = [c for c in lists[v] if c not in used]
            if len(rest) > 2 and not _clique_matchable(rest, free):
                return False
        return True

    def go() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"exact search exceeded {budget} nodes")
        if len(col) == cg.n:
            return True
        if not hall_ok():
            return False
        best, best_free = None, None
        for v in cg.vertices:
            if v in col:
                continue
            used = {col[u] for u in nb[v] if u in col}
            free = [c for c in lists[v] if c not in used]
            key = (len(free), -len(nb[v]), v)
            if best is None or key < best[0]:
                best, best_free = (key, v), free
            if not free:
                return False
        v = best[1]
        for c in best_free:
            col[v] = c
            if go():
                return True
            del col[v]
        return False

    return dict(col) if go() else None


def exact_list_sigma_colouring(g: SimpleGraph, s: SigmaSystem, lists: Lists,
                               budget: int = 2_000_000) -> dict[int, int] | None:
    """A list Sigma-colouring, or None when none exists."""
    if g.n > EXACT_LIMIT:
        raise BudgetExceeded(f"{g.n} vertices exceed the exact limit {EXACT_LIMIT}")
    cg = conflict_graph(g, s).base
    res = _dsatur(cg, {v: sorted(set(lists[v])) for v in g.vertices}, budget)
    return None if res is None else dict(sorted(res.items()))


@dataclass(frozen=True)
class ChromaticResult:
    value: int | None
    lower: int
    upper: int
    exact: bool
    colouring: dict[int, int] | None = None


def exact_sigma_chromatic(g: SimpleGraph, s: SigmaSystem, budget: int = 2_000_000) -> ChromaticResult:
    """chi(G; Sigma): clique lower bound, greedy upper bound, backtracking in between."""
    if g.n == 0:
        return ChromaticResult(0, 0, 0, True, {})
    cg = conflict_graph(g, s).base
    lower = max_clique(cg).size
    order = degeneracy_ordering(cg).order
    greedy: dict[int, int] = {}
    for v in order:
        used = {greedy[u] for u in cg.neighbours(v) if u in greedy}
        greedy[v] = min(c for c in range(cg.n + 1) if c not in used)
    upper = max(greedy.values()) + 1
    best = dict(greedy)
    if g.n > EXACT_LIMIT:
        return ChromaticResult(None, lower, upper, False, best)
    k = upper - 1
    try:
        while k >= lower:
            res = _dsatur(cg, {v: list(range(k)) for v in cg.vertices}, budget)
            if res is None:
                break
            best, upper = res, k
            k -= 1
    except BudgetExceeded:
        return ChromaticResult(None, lower, upper, False, best)
    return ChromaticResult(upper, lower, upper, True, dict(sorted(best.items())))


# -- pipeline ------------------------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineParams:
    zeta: int | None = None          # default 132 (3 - chi)
    beta: int | None = None          # default the instance's beta
    seed: int = 0
    delta: float = 0.0
    kahn: KahnParams = KahnParams()
    max_depth: int = 200
    exact_budget: int = 2_000_000


@dataclass
class PipelineResult:
    success: bool
    colouring: dict[int, int]
    stages: list[str]
    failure: str = ""


class _Failure(Exception):
    pass


def contract_s2(g: EmbeddedGraph, s: SigmaSystem, keep: int, gone: int) -> tuple[EmbeddedGraph, SigmaSystem]:
    """Contract keep-gone into keep: Sigma(keep) absorbs Sigma(gone), other sets trade keep/gone for keep."""
    g2 = g.contract(keep, gone)
    sets = {}
    for t in g2.vertices:
        if t == keep:
            sets[t] = (s(keep) | s(gone)) - {keep, gone}
        elif keep in s(t):
            sets[t] = (s(t) - {keep, gone}) | {keep}
        else:
            sets[t] = s(t) - {gone}
    return g2, SigmaSystem(g2.graph, sets)


def free_colour(g: SimpleGraph, s: SigmaSystem, col: Mapping[int, int], v: int, lists: Lists) -> int | None:
    cg = conflict_graph(g, s).base
    used = {col[u] for u in cg.neighbours(v) if u in col}
    free = sorted(set(lists[v]) - used)
    return free[0] if free else None


class _Pipeline:
    def __init__(self, params: PipelineParams, beta: int):
        self.p = params
        self.beta = beta
        self.stages: list[str] = []
        self.calls = 0

    def log(self, depth: int, msg: str) -> None:
        self.stages.append(f"{'  ' * depth}{msg}")

    def exact(self, g: SimpleGraph, s: SigmaSystem, lists: Lists, depth: int, why: str) -> dict[int, int]:
        self.log(depth, f"exact ({why})")
        try:
            res = exact_list_sigma_colouring(g, s, lists, self.p.exact_budget)
        except BudgetExceeded as exc:
            raise _Failure(f"exact fallback: {exc}") from None
        if res is None:
            raise _Failure("exact fallback: no list colouring exists")
        return res

    def colour(self, emb: EmbeddedGraph, s: SigmaSystem, lists: Lists, depth: int) -> dict[int, int]:
        g = emb.graph
        if g.n == 0:
            return {}
        if not g.is_connected():
            out: dict[int, int] = {}
            for comp in g.components():
                sub = emb.restrict(comp)
                out.update(self.colour(sub, SigmaSystem(sub.graph, {v: s(v) for v in comp}), lists, depth))
            return out
        if depth > self.p.max_depth:
            return self.exact(g, s, lists, depth, "depth guard")
        full = complete_to_edge_maximal(emb)
        s1 = s.rehost(full.graph)
        zeta = self.p.zeta if self.p.zeta is not None else zeta_star(emb.surface_chi)
        w = detect_structure(full, zeta)
        self.log(depth, f"n={g.n} structure {w.kind}")
        try:
            col = self._by_structure(full, s1, lists, w, zeta, depth)
        except (_Failure, ReductionError, EdgeBudget) as exc:
            self.log(depth, f"structural path failed: {exc}")
            col = self.exact(g, s, lists, depth, "fallback")
        problems = colouring_problems(g, s, col, lists)
        if problems:
            raise InvariantError(f"pipeline produced an invalid colouring: {problems[0]}")
        return col

    def _by_structure(self, full: EmbeddedGraph, s: SigmaSystem, lists: Lists, w, zeta: int, depth: int) -> dict[int, int]:
        g = full.graph
        if w.kind == "S1":
            res = greedy_sigma_colouring(g, s, lists)
            if not res.success:
                raise _Failure(f"greedy stuck at {res.failed_at}")
            return res.colouring
        if w.kind == "S2":
            v = w.s2[0]
            small = sorted(u for u in g.neighbours(v) if g.degree(u) <= zeta)
            if not small:
                raise _Failure(f"S2 vertex {v} has no small neighbour")
            return self._contract_and_recurse(full, s, lists, small[0], v, depth, "S2")
        if w.kind == "S3":
            bad = uncovered_y(s, w)
            if bad:
                y = bad[0]
                cand = sorted(u for u in g.neighbours(y) - set(w.xy[y]) if g.degree(u) == 4)
                if not cand:
                    raise _Failure(f"no degree-4 neighbour to contract at {y}")
                return self._contract_and_recurse(full, s, lists, cand[0], y, depth, "S3/claim")
            return self._reduce(full, s, lists, w, depth)
        raise _Failure("no structure found")

    def _contract_and_recurse(self, g: EmbeddedGraph, s: SigmaSystem, lists: Lists, keep: int, gone: int,
                              depth: int, tag: str) -> dict[int, int]:
        self.log(depth, f"{tag}: contract {gone} into {keep}")
        g2, s2 = contract_s2(g, s, keep, gone)
        col = dict(self.colour(g2, s2, lists, depth + 1))
        c = free_colour(g.graph, s, col, gone, lists)
        if c is None:
            raise _Failure(f"no free colour for {gone}")
        col[gone] = c
        return col

    def _reduce(self, g: EmbeddedGraph, s: SigmaSystem, lists: Lists, w, depth: int) -> dict[int, int]:
        self.log(depth, f"S3: |X|={len(w.X)} |Y|={len(w.Y)}")
        red = build_reduced_instance(g, s, w, self.beta)
        c0 = self.colour(red.embedded0, red.sigma0, lists, depth + 1)
        mi = build_matching_instance(g.graph, s, w, c0, lists)
        if any(not l for l in mi.lists.values()):
            raise _Failure("an edge of H has an empty list")
        res = kahn_run(mi.h, mi.lists, KahnParams(**{**self.p.kahn.__dict__, "seed": self.p.seed + depth}),
                       self.p.delta)
        if res.success:
            hcol = res.colouring
            self.log(depth, f"H coloured by {res.path}")
        else:
            self.log(depth, f"engine failed ({res.reason}); exact edge-colouring")
            hcol = exact_list_edge_colouring(mi.h, mi.lists)
            if hcol is None:
                raise _Failure("H has no list edge-colouring")
        return extend_colouring(c0, hcol, mi.origin, g.graph, s, lists)


def pipeline_sigma_colour(g: EmbeddedGraph, s: SigmaSystem, lists: Lists,
                          params: PipelineParams = PipelineParams()) -> PipelineResult:
    missing = [v for v in g.vertices if v not in lists]
    if missing:
        raise ValueError(f"lists missing for {missing}")
    beta = max(params.beta if params.beta is not None else s.beta, 12)
    runner = _Pipeline(params, beta)
    try:
        col = runner.colour(g, s, lists, 0)
    except _Failure as exc:
        return PipelineResult(False, {}, runner.stages, str(exc))
    problems = colouring_problems(g.graph, s, col, lists)
    if problems:
        raise InvariantError(problems[0])
    return PipelineResult(True, dict(sorted(col.items())), runner.stages)

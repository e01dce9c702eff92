"""The iterated naive colouring procedure for list edge-colouring multigraphs."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .graph_core import Multigraph, PreconditionError
from .hardcore import FitError, HardcoreModel, activities_from_marginals, substream
from .polytope import BudgetExceeded as MatchingBudget
from .polytope import edmonds_membership


class HypothesisError(PreconditionError):
    """The uniform marginals 1/|L(e)| are not inside (1 - delta) MP(H)."""


class BudgetExceeded(RuntimeError):
    pass


# -- validation ------------------------------------------------------------------------

def edge_colouring_problems(h: Multigraph, lists: Mapping[int, Iterable[int]],
                            colouring: Mapping[int, int]) -> list[str]:
    """Everything wrong with a claimed proper list edge-colouring (empty when valid)."""
    out = []
    for e in h.edges:
        if e.eid not in colouring:
            out.append(f"edge {e.eid} uncoloured")
        elif colouring[e.eid] not in set(lists[e.eid]):
            out.append(f"edge {e.eid} has colour {colouring[e.eid]} outside its list")
    for v in h.vertices:
        seen: dict[int, int] = {}
        for e in h.incident(v):
            c = colouring.get(e.eid)
            if c is None:
                continue
            if c in seen:
                out.append(f"edges {seen[c]} and {e.eid} meet at {v} with colour {c}")
            seen[c] = e.eid
    return out


# -- state -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ColourState:
    step: int
    graphs: dict[int, frozenset[int]]          # colour -> current edges of H^i_alpha
    lists: dict[int, frozenset[int]]           # uncoloured edge -> remaining colours
    committed: dict[int, int]                  # edge -> colour
    activities: dict[int, dict[int, float]]    # colour -> edge -> lambda (fixed)

    @property
    def colours(self) -> list[int]:
        return sorted(self.activities)

    def uncoloured(self) -> list[int]:
        return sorted(self.lists)


def check_state(h: Multigraph, st: ColourState) -> list[str]:
    """Invariants that must hold at every step boundary."""
    out = []
    for alpha, es in st.graphs.items():
        for eid in es:
            if eid in st.committed:
                out.append(f"committed edge {eid} still in H_{alpha}")
            elif alpha not in st.lists.get(eid, ()):
                out.append(f"edge {eid} in H_{alpha} but {alpha} not in its list")
    for eid, lst in st.lists.items():
        for alpha in lst:
            if eid not in st.graphs.get(alpha, ()):
                out.append(f"{alpha} in list of {eid} but edge not in H_{alpha}")
    if set(st.lists) & set(st.committed):
        out.append("an edge is both committed and uncoloured")
    used: dict[tuple[int, int], int] = {}
    for eid, alpha in st.committed.items():
        e = h.edge(eid)
        for v in (e.u, e.v):
            if (v, alpha) in used:
                out.append(f"colour {alpha} used twice at {v}")
            used[(v, alpha)] = eid
    return out


def uniform_marginals(lists: Mapping[int, Iterable[int]]) -> dict[int, Fraction]:
    return {eid: Fraction(1, len(set(l))) for eid, l in lists.items()}


def init_state(h: Multigraph, lists: Mapping[int, Iterable[int]], delta: float) -> ColourState:
    lists = {eid: frozenset(lists[eid]) for eid in h.edge_ids}
    empty = [eid for eid, l in lists.items() if not l]
    if empty:
        raise PreconditionError(f"empty colour lists on edges {empty}")
    x = uniform_marginals(lists)
    verdict = edmonds_membership(h, x, 1 - Fraction(delta))
    if not verdict.inside:
        raise HypothesisError(f"theorem hypotheses unmet: 1/|L| not in (1-delta)MP(H); {verdict.violated}")
    colours = sorted(set().union(*lists.values())) if lists else []
    graphs, acts = {}, {}
    for alpha in colours:
        es = frozenset(eid for eid, l in lists.items() if alpha in l)
        sub = h.subgraph_edges(es)
        # a sub-vector of a point in (1-delta)MP(H) stays in (1-delta)MP(H_alpha)
        acts[alpha] = activities_from_marginals(sub, {eid: x[eid] for eid in es}, delta, check=False)
        graphs[alpha] = es
    return ColourState(0, graphs, dict(lists), {}, acts)


# -- one round ---------------------------------------------------------------------------

class _ModelCache:
    def __init__(self, h: Multigraph):
        self.h = h
        self.cache: dict[tuple[int, frozenset[int]], HardcoreModel] = {}

    def get(self, alpha: int, edges: frozenset[int], lam: Mapping[int, float]) -> HardcoreModel:
        key = (alpha, edges)
        if key not in self.cache:
            sub = self.h.subgraph_edges(edges)
            self.cache[key] = HardcoreModel(sub, {e: lam[e] for e in edges})
        return self.cache[key]


def naive_step(h: Multigraph, st: ColourState, seed: int, workers: int = 1,
               cache: _ModelCache | None = None, telemetry: list | None = None) -> ColourState:
    """(a) a hardcore matching per colour, (b) uniform tie-break, (c) shrink the colour graphs."""
    live = [a for a in st.colours if st.graphs[a]]
    if not live:
        return st
    cache = cache or _ModelCache(h)
    index = {a: i for i, a in enumerate(st.colours)}

    def propose(alpha: int) -> frozenset[int]:
        m = cache.get(alpha, st.graphs[alpha], st.activities[alpha])
        return m.sample(substream(seed, st.step, 0, index[alpha]))

    # models are built serially so that threads only sample
    for a in live:
        cache.get(a, st.graphs[a], st.activities[a])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            proposals = dict(zip(live, pool.map(propose, live)))
    else:
        proposals = {a: propose(a) for a in live}

    offers: dict[int, list[int]] = {}
    for a in live:
        for eid in proposals[a]:
            offers.setdefault(eid, []).append(a)
    chosen: dict[int, int] = {}
    for eid in sorted(offers):
        cands = offers[eid]
        if len(cands) == 1:
            chosen[eid] = cands[0]
        else:
            rng = substream(seed, st.step, 1, eid)
            chosen[eid] = cands[int(rng.integers(len(cands)))]

    newly = frozenset(chosen)
    graphs = {}
    for a in st.colours:
        hit = {v for eid, c in chosen.items() if c == a for v in (h.edge(eid).u, h.edge(eid).v)}
        graphs[a] = frozenset(eid for eid in st.graphs[a] - newly
                              if h.edge(eid).u not in hit and h.edge(eid).v not in hit)
    committed = dict(st.committed)
    committed.update(chosen)
    lists = {}
    for eid in st.lists:
        if eid in newly:
            continue
        lists[eid] = frozenset(a for a in st.lists[eid] if eid in graphs[a])
    if telemetry is not None:
        for a in live:
            telemetry.append((st.step, a, sum(1 for c in chosen.values() if c == a), len(graphs[a])))
    return replace(st, step=st.step + 1, graphs=graphs, lists=lists, committed=committed)


# -- finishing and the full run ------------------------------------------------------------

def _uncoloured_degree(h: Multigraph, edges: Iterable[int]) -> int:
    deg: dict[int, int] = {}
    for eid in edges:
        e = h.edge(eid)
        deg[e.u] = deg.get(e.u, 0) + 1
        deg[e.v] = deg.get(e.v, 0) + 1
    return max(deg.values(), default=0)


def greedy_finish(h: Multigraph, lists: Mapping[int, Iterable[int]], T: int,
                  fixed: Mapping[int, int] | None = None) -> dict[int, int]:
    """Colour the edges of ``lists`` in ascending id, avoiding colours at both ends."""
    todo = sorted(lists)
    if _uncoloured_degree(h, todo) > T:
        raise PreconditionError(f"uncoloured degree exceeds T={T}")
    short = [eid for eid in todo if len(set(lists[eid])) < 2 * T]
    if short:
        raise PreconditionError(f"lists shorter than 2T={2 * T} on edges {short}")
    out = dict(fixed or {})
    for eid in todo:
        e = h.edge(eid)
        near = {out[f.eid] for v in (e.u, e.v) for f in h.incident(v) if f.eid in out}
        free = sorted(set(lists[eid]) - near)
        if not free:
            raise RuntimeError(f"greedy finish stuck at edge {eid}")   # impossible under the preconditions
        out[eid] = free[0]
    return out


@dataclass(frozen=True)
class KahnParams:
    K: float | None = None        # activity bound; default Delta * max lambda
    s: int | None = None
    T: int | None = None
    retries: int = 5
    seed: int = 0
    eager_finish: bool = True     # go straight to the greedy finish once lists >= 2 * degree
    workers: int = 1


def default_schedule(delta_h: int, K: float) -> tuple[int, int]:
    """(s, T) with s = ceil(ln(4K) + 1) and T = ceil(Delta / (2eK)), both at least 1."""
    K = max(K, 1e-12)
    s = max(1, math.ceil(math.log(4 * K) + 1))
    T = max(1, math.ceil(delta_h / (2 * math.e * K)))
    return s, T


@dataclass
class KahnResult:
    success: bool
    colouring: dict[int, int]
    path: str                     # "kahn", "greedy", or "failed"
    attempts: int
    s: int = 0
    T: int = 0
    K: float = 0.0
    reason: str = ""
    final_degree: int = 0
    final_min_list: int = 0
    telemetry: list[tuple[int, int, int, int, int]] = field(default_factory=list)

    def telemetry_csv(self) -> str:
        rows = ["attempt,step,colour,matched,remaining"]
        rows += [",".join(map(str, r)) for r in self.telemetry]
        return "\n".join(rows) + "\n"


def _eager_ready(h: Multigraph, lists: Mapping[int, frozenset[int]]) -> int | None:
    d = _uncoloured_degree(h, lists)
    if all(len(l) >= 2 * d for l in lists.values()):
        return max(d, 1)
    return None


def run(h: Multigraph, lists: Mapping[int, Iterable[int]], params: KahnParams = KahnParams(),
        delta: float = 0.0) -> KahnResult:
    lists = {eid: frozenset(lists[eid]) for eid in h.edge_ids}
    if not lists:
        return KahnResult(True, {}, "greedy", 0)
    try:
        st0 = init_state(h, lists, delta)
    except (HypothesisError, FitError, MatchingBudget) as exc:
        T = _eager_ready(h, lists)
        if T is not None:
            col = greedy_finish(h, lists, T)
            return KahnResult(True, col, "greedy", 0, T=T, reason=f"fallback: {exc}")
        return KahnResult(False, {}, "failed", 0, reason=str(exc),
                          final_degree=h.max_degree(), final_min_list=min(map(len, lists.values())))
    K = params.K
    if K is None:
        K = h.max_degree() * max((l for acts in st0.activities.values() for l in acts.values()), default=0.0)
    s, T = default_schedule(h.max_degree(), K)
    s = params.s if params.s is not None else s
    T = params.T if params.T is not None else T
    telemetry: list[tuple[int, int, int, int, int]] = []
    cache = _ModelCache(h)
    st = st0
    for attempt in range(params.retries):
        st = st0
        seed = int(substream(params.seed, attempt).integers(2 ** 63))
        for _ in range(s):
            if params.eager_finish and _eager_ready(h, st.lists) is not None:
                break
            rows: list = []
            st = naive_step(h, st, seed, params.workers, cache, rows)
            telemetry += [(attempt, *r) for r in rows]
            bad = check_state(h, st)
            if bad:
                raise RuntimeError(f"colour state invariant broken: {bad[0]}")
        d = _uncoloured_degree(h, st.lists)
        eager = _eager_ready(h, st.lists) if params.eager_finish else None
        if eager is not None or (d <= T and all(len(l) >= 2 * T for l in st.lists.values())):
            col = greedy_finish(h, st.lists, eager if eager is not None else T, st.committed)
            problems = edge_colouring_problems(h, lists, col)
            if problems:
                raise RuntimeError(f"engine produced an invalid colouring: {problems[0]}")
            path = "greedy" if st.step == 0 else "kahn"
            return KahnResult(True, col, path, attempt + 1, s, T, K, telemetry=telemetry,
                              final_degree=d, final_min_list=min(map(len, st.lists.values()), default=0))
    return KahnResult(False, {}, "failed", params.retries, s, T, K, "retries exhausted",
                      _uncoloured_degree(h, st.lists), min(map(len, st.lists.values()), default=0), telemetry)


# -- exact fallback ---------------------------------------------------------------------------

def exact_list_edge_colouring(h: Multigraph, lists: Mapping[int, Iterable[int]],
                              budget: int = 2_000_000) -> dict[int, int] | None:
    """Backtracking over edges in decreasing-degree order; None when no colouring exists."""
    lists = {eid: sorted(set(lists[eid])) for eid in h.edge_ids}
    order = sorted(h.edge_ids, key=lambda eid: (-(h.degree(h.edge(eid).u) + h.degree(h.edge(eid).v)), eid))
    at: dict[int, set[int]] = {v: set() for v in h.vertices}
    out: dict[int, int] = {}
    nodes = 0

    def go(i: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"exact edge-colouring exceeded {budget} nodes")
        if i == len(order):
            return True
        eid = order[i]
        e = h.edge(eid)
        for c in lists[eid]:
            if c in at[e.u] or c in at[e.v]:
                continue
            at[e.u].add(c)
            at[e.v].add(c)
            out[eid] = c
            if go(i + 1):
                return True
            at[e.u].discard(c)
            at[e.v].discard(c)
            del out[eid]
        return False

    return dict(sorted(out.items())) if go(0) else None

"""Hardcore distributions over the matchings of a multigraph."""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from numbers import Real

import numpy as np

from .graph_core import Multigraph, PreconditionError
from .polytope import MATCHING_BUDGET, edmonds_membership, enumerate_matchings


class FitError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


NEWTON_LIMIT = 200


def substream(seed: int, *tag: int) -> np.random.Generator:
    """Independent random stream for (master seed, call tag)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(t) for t in tag)))


class HardcoreModel:
    """P(M) proportional to the product of lambda_e over e in M.

    With ``exact=True`` activities are kept as Fractions and every probability is exact.
    """

    def __init__(self, h: Multigraph, activities: Mapping[int, Real], exact: bool = False,
                 budget: int = MATCHING_BUDGET):
        ids = set(h.edge_ids)
        if set(activities) != ids:
            raise PreconditionError("activities must be given for exactly the edges of h")
        if any(v < 0 for v in activities.values()):
            raise PreconditionError("activities must be non-negative")
        self.h = h
        self.exact = exact
        self.edge_ids = list(h.edge_ids)
        self.col = {eid: i for i, eid in enumerate(self.edge_ids)}
        self.matchings = enumerate_matchings(h, budget)
        self.vidx = {v: i for i, v in enumerate(h.vertices)}
        nm, ne = len(self.matchings), len(self.edge_ids)
        self.incidence = np.zeros((nm, ne), dtype=bool)
        self.covers = np.zeros((nm, len(self.vidx)), dtype=bool)
        for k, M in enumerate(self.matchings):
            for eid in M:
                self.incidence[k, self.col[eid]] = True
                e = h.edge(eid)
                self.covers[k, self.vidx[e.u]] = True
                self.covers[k, self.vidx[e.v]] = True
        if exact:
            self.activities = {eid: Fraction(activities[eid]) for eid in self.edge_ids}
            weights = []
            for M in self.matchings:
                w = Fraction(1)
                for eid in M:
                    w *= self.activities[eid]
                weights.append(w)
            self.Z = sum(weights, Fraction(0))
            self.probs = [w / self.Z for w in weights]
            self._p = np.array([float(p) for p in self.probs])
        else:
            self._set_float([float(activities[eid]) for eid in self.edge_ids])

    def _set_float(self, lam) -> None:
        lam = np.asarray(lam, dtype=float)
        self.activities = dict(zip(self.edge_ids, lam.tolist()))
        weights = np.prod(np.where(self.incidence, lam[None, :], 1.0), axis=1)
        self.Z = float(weights.sum())
        self._p = weights / self.Z
        self.probs = list(self._p)

    def reweighted(self, lam) -> "HardcoreModel":
        """Same graph, new float activities (given in edge-id order); reuses the enumeration."""
        m = object.__new__(HardcoreModel)
        m.__dict__.update(self.__dict__)
        m.exact = False
        m._set_float(lam)
        return m

    def probability(self, matching) -> Real:
        return self.probs[self.matchings.index(frozenset(matching))]

    def marginals(self) -> dict[int, Real]:
        if self.exact:
            out = {eid: Fraction(0) for eid in self.edge_ids}
            for M, p in zip(self.matchings, self.probs):
                for eid in M:
                    out[eid] += p
            return out
        x = self._p @ self.incidence
        return {eid: float(x[i]) for i, eid in enumerate(self.edge_ids)}

    def avoidance(self, u: int, v: int) -> Real:
        if u == v:
            raise PreconditionError("avoidance needs two distinct vertices")
        miss = ~(self.covers[:, self.vidx[u]] | self.covers[:, self.vidx[v]])
        if self.exact:
            return sum((p for p, keep in zip(self.probs, miss) if keep), Fraction(0))
        return float(self._p[miss].sum())

    def entropy(self) -> float:
        p = self._p[self._p > 0]
        return float(-(p * np.log(p)).sum())

    def sample(self, rng: np.random.Generator, n: int | None = None):
        """One matching (or a list of n) by inversion of the cumulative distribution."""
        cdf = np.cumsum(self._p)
        cdf[-1] = 1.0
        draws = rng.random(1 if n is None else n)
        idx = np.searchsorted(cdf, draws, side="right")
        picked = [self.matchings[int(i)] for i in idx]
        return picked[0] if n is None else picked


def marginals_from_activities(m: HardcoreModel) -> dict[int, Real]:
    return m.marginals()


def avoidance_probability(h: Multigraph, lam: Mapping[int, Real], u: int, v: int, exact: bool = False) -> Real:
    return HardcoreModel(h, lam, exact).avoidance(u, v)


def sample_matching(m: HardcoreModel, seed: int | np.random.Generator, n: int | None = None):
    rng = seed if isinstance(seed, np.random.Generator) else substream(seed)
    return m.sample(rng, n)


def _residual(m: HardcoreModel, target: np.ndarray) -> np.ndarray:
    return m._p @ m.incidence - target


def activities_from_marginals(h: Multigraph, x: Mapping[int, Real], delta: Real,
                              tol: float = 1e-12, max_iter: int = 100_000,
                              check: bool = True) -> dict[int, float]:
    """The unique activities whose hardcore marginals are x.

    Damped fixed point on x_e = lambda_e * Pr(M misses both ends of e), then Newton steps
    on the convex dual log Z(theta) - theta.x (theta = log lambda) to reach tolerance.
    Edges with x_e = 0 get activity 0.
    """
    if not 0 <= delta < 1:
        raise PreconditionError("delta must lie in [0, 1)")
    if check:
        verdict = edmonds_membership(h, x, 1 - Fraction(delta))
        if not verdict.inside:
            raise PreconditionError(f"marginals are not in (1-delta)MP(H): {verdict.violated}")
    for v in h.vertices:
        load = sum(x.get(e.eid, 0) for e in h.incident(v))
        if load >= 1:
            # the empty matching has positive weight, so a saturated vertex is out of reach
            raise FitError(f"vertex {v} is saturated; no finite activities reach x", float(load))
    zero = [e for e in h.edge_ids if x.get(e, 0) == 0]
    live = h.subgraph_edges([e for e in h.edge_ids if e not in zero])
    out = {e: 0.0 for e in zero}
    if not live.edges:
        return out
    ids = list(live.edge_ids)
    target = np.array([float(x[e]) for e in ids])
    ends = [live.edge(e) for e in ids]
    lam = target.copy()
    damp = 1.0
    best = np.inf
    it = 0

    base = HardcoreModel(live, dict(zip(ids, lam)))

    def model(l: np.ndarray) -> HardcoreModel:
        return base.reweighted(l)

    m = base
    # fixed-point phase, handed over to Newton once close
    while it < max_iter:
        it += 1
        res = np.abs(_residual(m, target)).max()
        if res <= 1e-4 or it > 500:
            break
        if res > best:
            damp = max(damp * 0.5, 1e-3)
        best = min(best, res)
        avoid = np.array([m.avoidance(e.u, e.v) for e in ends])
        proposal = target / avoid
        lam = lam ** (1 - damp) * proposal ** damp
        m = model(lam)
    # Newton phase; converges in a handful of steps unless x sits on the boundary
    theta = np.log(lam)
    newton = 0
    while it < max_iter and newton < NEWTON_LIMIT:
        it += 1
        newton += 1
        grad = _residual(m, target)
        res = np.abs(grad).max()
        if res <= tol:
            break
        p = m._p
        A = m.incidence.astype(float)
        cov = (A * p[:, None]).T @ A - np.outer(p @ A, p @ A)
        step = np.linalg.lstsq(cov, -grad, rcond=None)[0]
        f0 = np.log(m.Z) - theta @ target
        t = 1.0
        while t > 1e-10:
            cand = theta + t * step
            mc = model(np.exp(cand))
            if np.log(mc.Z) - cand @ target <= f0 + 1e-4 * t * (grad @ step):
                break
            # near the optimum the objective change drops below float resolution; the gradient still shows progress
            if np.abs(_residual(mc, target)).max() < res:
                break
            t *= 0.5
        theta, m = cand, mc
        if t <= 1e-10:
            break
    res = float(np.abs(_residual(m, target)).max())
    if res > 1e-9:
        raise FitError("activity fitting did not converge", res)
    out.update(zip(ids, (float(v) for v in np.exp(theta))))
    return {e: out[e] for e in h.edge_ids}


def stationarity_residual(h: Multigraph, lam: Mapping[int, Real], x: Mapping[int, Real]) -> float:
    """max_e |x_e - lambda_e * Pr(M misses both ends of e)|."""
    m = HardcoreModel(h, lam)
    return max((abs(float(x[e.eid]) - lam[e.eid] * m.avoidance(e.u, e.v)) for e in h.edges), default=0.0)

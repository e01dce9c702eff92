"""Matchings, the matching polytope and the certificate checker for scaled marginals."""

from __future__ import annotations

import math
import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

import numpy as np

from ._subsets import linear_sums, pair_sums, popcounts
from .graph_core import Multigraph, PreconditionError

#: largest edge count enumerate_matchings accepts by default
MATCHING_BUDGET = 24
#: largest vertex count for exhaustive odd-set enumeration
ODD_SET_LIMIT = 16
#: largest vertex count for exhaustive subset checks of the density hypothesis
SUBSET_LIMIT = 20


class BudgetExceeded(RuntimeError):
    pass


def as_fraction(v: Real | str) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


# -- matchings ---------------------------------------------------------------------

def enumerate_matchings(h: Multigraph, budget: int = MATCHING_BUDGET) -> list[frozenset[int]]:
    """Every matching (as a set of edge ids), the empty one first."""
    if len(h.edges) > budget:
        raise BudgetExceeded(f"{len(h.edges)} edges exceed the budget of {budget}")
    edges = list(h.edges)
    out: list[frozenset[int]] = []

    def grow(i: int, used: frozenset[int], chosen: tuple[int, ...]) -> None:
        out.append(frozenset(chosen))
        for j in range(i, len(edges)):
            e = edges[j]
            if e.u not in used and e.v not in used:
                grow(j + 1, used | {e.u, e.v}, chosen + (e.eid,))

    grow(0, frozenset(), ())
    return out


# -- membership -----------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    kind: str                 # "vertex", "odd_set" or "hull"
    members: tuple[int, ...]
    lhs: Fraction | float
    rhs: Fraction | float

    @property
    def slack(self):
        """Amount by which the constraint is exceeded (positive when violated)."""
        return self.lhs - self.rhs


@dataclass(frozen=True)
class PolytopeVerdict:
    inside: bool
    scale: Fraction | float
    violated: Constraint | None = None
    mode: str = "exhaustive"

    def __bool__(self) -> bool:
        return self.inside


def _check_vector(h: Multigraph, x: Mapping[int, Real]) -> dict[int, Fraction]:
    ids = set(h.edge_ids)
    if set(x) - ids:
        raise PreconditionError(f"vector has entries for unknown edges {sorted(set(x) - ids)}")
    out = {eid: as_fraction(x.get(eid, 0)) for eid in h.edge_ids}
    neg = [eid for eid, v in out.items() if v < 0]
    if neg:
        raise PreconditionError(f"negative entries at edges {neg}")
    return out


def _pair_matrix(h: Multigraph, weights: Mapping[int, Fraction]) -> tuple[list[int], np.ndarray]:
    xs = list(h.vertices)
    idx = {v: i for i, v in enumerate(xs)}
    w = np.empty((len(xs), len(xs)), dtype=object)
    w[:] = Fraction(0)
    for e in h.edges:
        i, j = idx[e.u], idx[e.v]
        w[i, j] += weights[e.eid]
        w[j, i] = w[i, j]
    return xs, w


def _scaled_integers(w: np.ndarray) -> tuple[np.ndarray, int] | None:
    """Integer matrix and common denominator when everything fits comfortably in int64."""
    den = 1
    for v in w.flat:
        den = math.lcm(den, v.denominator)
    ints = np.array([[int(v * den) for v in row] for row in w], dtype=object)
    if ints.size and int(np.abs(ints).sum()) >= 2 ** 62:
        return None
    return ints.astype(np.int64), den


def edmonds_membership(h: Multigraph, x: Mapping[int, Real], scale: Real = 1,
                       rng: random.Random | None = None) -> PolytopeVerdict:
    """Is x in scale * MP(h)?  Exact rational check; the first violated constraint is reported."""
    xv = _check_vector(h, x)
    lam = as_fraction(scale)
    if lam <= 0:
        raise PreconditionError("scale must be positive")
    for v in h.vertices:
        load = sum((xv[e.eid] for e in h.incident(v)), Fraction(0))
        if load > lam:
            return PolytopeVerdict(False, lam, Constraint("vertex", (v,), load, lam))
    xs, w = _pair_matrix(h, xv)
    n = len(xs)
    if n <= ODD_SET_LIMIT:
        scaled = _scaled_integers(w)
        if scaled is not None:
            ints, den = scaled
            inside_sum = pair_sums(ints)
            size = popcounts(n)
            # violated iff inside_sum/den > lam (|W|-1)/2
            lhs = 2 * inside_sum.astype(object) * lam.denominator
            rhs = (size.astype(object) - 1) * lam.numerator * den
            bad = (size >= 3) & (size % 2 == 1) & np.array(lhs > rhs, dtype=bool)
        else:
            inside_sum = pair_sums(w)
            size = popcounts(n)
            bad = np.array([s >= 3 and s % 2 == 1 and 2 * t > (s - 1) * lam
                            for t, s in zip(inside_sum, size)], dtype=bool)
        if not bad.any():
            return PolytopeVerdict(True, lam)
        masks = np.nonzero(bad)[0]
        # fixed order: by size, then lexicographic on sorted members
        best = min(masks, key=lambda m: (int(size[m]), [i for i in range(n) if (int(m) >> i) & 1]))
        members = tuple(xs[i] for i in range(n) if (int(best) >> i) & 1)
        ms = set(members)
        total = sum((xv[e.eid] for e in h.edges if e.u in ms and e.v in ms), Fraction(0))
        return PolytopeVerdict(False, lam, Constraint("odd_set", members, total,
                                                      lam * (len(members) - 1) / 2))
    rng = rng or random.Random(0)
    for _ in range(20000):
        k = rng.randrange(3, n + 1, 2)
        members = tuple(sorted(rng.sample(xs, k)))
        ms = set(members)
        total = sum((xv[e.eid] for e in h.edges if e.u in ms and e.v in ms), Fraction(0))
        if total > lam * (k - 1) / 2:
            return PolytopeVerdict(False, lam, Constraint("odd_set", members, total, lam * (k - 1) / 2), "sampled")
    return PolytopeVerdict(True, lam, None, "sampled")


def hull_membership_oracle(h: Multigraph, x: Mapping[int, Real], tol: float = 1e-9,
                           budget: int = MATCHING_BUDGET) -> PolytopeVerdict:
    """x as a convex combination of matching indicators, decided by a linear program.

    Minimises the L1 residual of A mu = x over the simplex; x is inside iff the optimum is 0.
    """
    from scipy.optimize import linprog

    xv = _check_vector(h, x)
    matchings = enumerate_matchings(h, budget)
    ids = list(h.edge_ids)
    m, k = len(ids), len(matchings)
    A = np.zeros((m, k))
    row = {eid: i for i, eid in enumerate(ids)}
    for j, M in enumerate(matchings):
        for eid in M:
            A[row[eid], j] = 1.0
    target = np.array([float(xv[eid]) for eid in ids])
    # variables: mu (k), s_plus (m), s_minus (m)
    c = np.concatenate([np.zeros(k), np.ones(2 * m)])
    A_eq = np.vstack([
        np.hstack([A, np.eye(m), -np.eye(m)]),
        np.concatenate([np.ones(k), np.zeros(2 * m)])[None, :],
    ])
    b_eq = np.concatenate([target, [1.0]])
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    resid = float(res.fun)
    if resid <= tol:
        return PolytopeVerdict(True, 1.0, None, "lp")
    return PolytopeVerdict(False, 1.0, Constraint("hull", (), resid, 0.0), "lp")


# -- fractional chromatic index --------------------------------------------------------

def fractional_chromatic_index(h: Multigraph) -> Fraction:
    """max(Delta, max over odd W (|W| >= 3) of 2|E(W)| / (|W| - 1))."""
    if not h.edges:
        return Fraction(0)
    best = Fraction(h.max_degree())
    xs, w = _pair_matrix(h, {eid: Fraction(1) for eid in h.edge_ids})
    n = len(xs)
    if n > ODD_SET_LIMIT:
        raise BudgetExceeded(f"{n} vertices exceed the odd-set limit {ODD_SET_LIMIT}")
    counts = pair_sums(np.array([[int(v) for v in row] for row in w], dtype=np.int64))
    size = popcounts(n)
    for k in range(3, n + 1, 2):
        sel = counts[size == k]
        if len(sel):
            best = max(best, Fraction(2 * int(sel.max()), k - 1))
    return best


def fractional_chromatic_index_search(h: Multigraph, tol: float = 1e-9) -> float:
    """Smallest gamma with (1/gamma, ..., 1/gamma) in MP(h), by bisection on membership."""
    if not h.edges:
        return 0.0
    lo, hi = 0.0, 2.0 * h.max_degree()
    while hi - lo > tol:
        mid = (lo + hi) / 2
        x = {eid: Fraction(1) / Fraction(mid) for eid in h.edge_ids}
        if edmonds_membership(h, x).inside:
            hi = mid
        else:
            lo = mid
    return hi


# -- certificate for scaled marginals -------------------------------------------------

def k_zeta(zeta: Real) -> Fraction:
    return max(Fraction(0), Fraction(9, 2) * as_fraction(zeta))


@dataclass
class CertificateReport:
    h1: list[tuple[int, str]] = field(default_factory=list)
    h2: list[tuple[int, Fraction]] = field(default_factory=list)      # (edge, shortfall)
    h3: list[tuple[tuple[int, ...], Fraction]] = field(default_factory=list)
    h3_mode: str = "exhaustive"
    k_ok: bool = True
    hypotheses_hold: bool = False
    half_beta_ok: bool | None = None
    membership: PolytopeVerdict | None = None
    falsified: bool = False

    @property
    def conclusion_holds(self) -> bool | None:
        if not self.hypotheses_hold:
            return None
        return bool(self.half_beta_ok and self.membership and self.membership.inside)

    def summary(self) -> str:
        if not self.hypotheses_hold:
            parts = []
            if self.h1:
                parts.append(f"H1' fails at {len(self.h1)} vertices")
            if self.h2:
                parts.append(f"H2' fails at {len(self.h2)} edges (worst shortfall {max(s for _, s in self.h2)})")
            if self.h3:
                parts.append(f"H3' fails for W = {list(self.h3[0][0])}")
            if not self.k_ok:
                parts.append("K below K_zeta")
            return "hypotheses do not hold: " + "; ".join(parts)
        if self.falsified:
            return "FALSIFIED: hypotheses hold but the conclusion fails"
        return "hypotheses hold; b_e >= beta/2 and 1/b in MP(H)"


def density_violations(h: Multigraph, sigma: Mapping[int, int], zeta: Real,
                       first_only: bool = True) -> tuple[list[tuple[tuple[int, ...], Fraction]], str]:
    """W with sum (sigma - d_H) > e_H(W, V\\W) + zeta |W|; exhaustive up to SUBSET_LIMIT vertices."""
    xs = list(h.vertices)
    n = len(xs)
    z = as_fraction(zeta)
    if n == 0:
        return [], "exhaustive"
    idx = {v: i for i, v in enumerate(xs)}
    m = np.zeros((n, n), dtype=np.int64)
    for e in h.edges:
        m[idx[e.u], idx[e.v]] += 1
        m[idx[e.v], idx[e.u]] += 1
    deg = m.sum(axis=1)
    base = np.array([sigma[v] for v in xs], dtype=np.int64) - 2 * deg

    def excess(sel: list[int]) -> Fraction:
        inside = sum(int(m[i, j]) for a, i in enumerate(sel) for j in sel[a + 1:])
        return int(base[sel].sum()) + 2 * inside - z * len(sel)

    if n <= SUBSET_LIMIT:
        lhs = linear_sums(base) + 2 * pair_sums(m)        # sum(sigma - d) - cut
        size = popcounts(n)
        bad = np.array(lhs * z.denominator > size * z.numerator, dtype=bool)
        bad[0] = False
        out = []
        for mask in np.nonzero(bad)[0]:
            sel = [i for i in range(n) if (int(mask) >> i) & 1]
            out.append((tuple(xs[i] for i in sel), excess(sel)))
            if first_only:
                break
        return out, "exhaustive"
    rng = random.Random(0)
    for _ in range(20000):
        sel = sorted(i for i in range(n) if rng.random() < 0.5)
        if sel and excess(sel) > 0:
            return [(tuple(xs[i] for i in sel), excess(sel))], "sampled"
    return [], "sampled"


def lem_mp_certificate(h: Multigraph, sigma: Mapping[int, int], beta: Real, zeta: Real, K: Real,
                       b: Mapping[int, Real]) -> CertificateReport:
    rep = CertificateReport()
    beta_f, K_f = as_fraction(beta), as_fraction(K)
    for v in h.vertices:
        if not h.degree(v) <= sigma[v] <= beta_f:
            rep.h1.append((v, f"d={h.degree(v)}, sigma={sigma[v]}, beta={beta}"))
    bf = {eid: as_fraction(b[eid]) for eid in h.edge_ids}
    for e in h.edges:
        need = Fraction(3, 2) * beta_f + K_f - (sigma[e.u] - h.degree(e.u)) - (sigma[e.v] - h.degree(e.v))
        if bf[e.eid] < need:
            rep.h2.append((e.eid, need - bf[e.eid]))
    rep.h3, rep.h3_mode = density_violations(h, sigma, zeta)
    rep.k_ok = K_f >= k_zeta(zeta)
    rep.hypotheses_hold = not rep.h1 and not rep.h2 and not rep.h3 and rep.k_ok
    if rep.hypotheses_hold:
        rep.half_beta_ok = all(bf[eid] >= beta_f / 2 for eid in h.edge_ids)
        if all(v > 0 for v in bf.values()):
            rep.membership = edmonds_membership(h, {eid: 1 / bf[eid] for eid in h.edge_ids})
        rep.falsified = not rep.conclusion_holds
    return rep

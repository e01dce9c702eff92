from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from sigmacol.catalogue import multigraph_catalogue, shannon_triangle
from sigmacol.graph_core import Multigraph, PreconditionError
from sigmacol.polytope import (BudgetExceeded, edmonds_membership, enumerate_matchings, fractional_chromatic_index,
                               fractional_chromatic_index_search, hull_membership_oracle, k_zeta,
                               lem_mp_certificate)

CATALOGUE = multigraph_catalogue()


def triangle() -> Multigraph:
    return Multigraph(range(3), [(0, 1), (1, 2), (0, 2)])


def k4() -> Multigraph:
    return Multigraph(range(4), list(combinations(range(4), 2)))


def constant(h: Multigraph, v) -> dict[int, Fraction]:
    return {eid: Fraction(v) for eid in h.edge_ids}


def line_graph_independent_sets(h: Multigraph) -> int:
    """Edge subsets with pairwise disjoint endpoints, by brute force over all subsets."""
    edges = list(h.edges)
    count = 0
    for mask in range(1 << len(edges)):
        chosen = [e for i, e in enumerate(edges) if mask >> i & 1]
        ends = [v for e in chosen for v in (e.u, e.v)]
        count += len(ends) == len(set(ends))
    return count


# -- matchings -----------------------------------------------------------------------------

@pytest.mark.parametrize("h, count", [(Multigraph(range(2), [(0, 1)]), 2), (triangle(), 4), (k4(), 10)])
def test_matching_counts(h, count):
    ms = enumerate_matchings(h)
    assert len(ms) == count
    assert ms[0] == frozenset()


@pytest.mark.parametrize("name, h", CATALOGUE[:30])
def test_matchings_complete_and_distinct(name, h):
    ms = enumerate_matchings(h)
    assert len(ms) == len(set(ms)) == line_graph_independent_sets(h)


def test_matching_budget():
    h = Multigraph(range(2), [(0, 1)] * 25)
    with pytest.raises(BudgetExceeded):
        enumerate_matchings(h)


# -- membership ---------------------------------------------------------------------------------

def test_triangle_third_inside():
    assert edmonds_membership(triangle(), constant(triangle(), Fraction(1, 3))).inside


def test_triangle_half_outside_on_whole_set():
    v = edmonds_membership(triangle(), constant(triangle(), Fraction(1, 2)))
    assert not v.inside
    assert v.violated.kind == "odd_set" and v.violated.members == (0, 1, 2)
    assert v.violated.slack == Fraction(1, 2)


@pytest.mark.parametrize("lam", [Fraction(1, 7), Fraction(1, 2), 1])
def test_zero_vector_inside(lam):
    h = k4()
    assert edmonds_membership(h, constant(h, 0), lam).inside


def test_scaled_polytope():
    h = triangle()
    x = constant(h, Fraction(1, 6))
    assert edmonds_membership(h, x, Fraction(1, 2)).inside
    v = edmonds_membership(h, x, Fraction(1, 3))
    # vertex loads are exactly 1/3; the whole triangle carries 1/2 against 1/3
    assert not v.inside and v.violated.kind == "odd_set"
    assert v.violated.slack == Fraction(1, 6)


def test_negative_entry_rejected():
    with pytest.raises(PreconditionError):
        edmonds_membership(triangle(), {0: Fraction(-1, 5)})


def test_hull_oracle_examples():
    t = triangle()
    assert hull_membership_oracle(t, constant(t, Fraction(1, 3))).inside
    assert not hull_membership_oracle(t, constant(t, Fraction(1, 2))).inside
    path = Multigraph(range(3), [(0, 1), (1, 2)])
    x = {0: Fraction(3, 5), 1: Fraction(3, 5)}
    assert not hull_membership_oracle(path, x).inside
    v = edmonds_membership(path, x)
    assert v.violated.kind == "vertex" and v.violated.members == (1,) and v.violated.lhs == Fraction(6, 5)


def random_vector(h: Multigraph, rng: random.Random) -> dict[int, Fraction]:
    # spread of scales so that both verdicts are common
    top = rng.choice([2, 3, 4, 6])
    return {eid: Fraction(rng.randint(0, 12), 12 * top) * rng.choice([1, 1, 2]) for eid in h.edge_ids}


@pytest.mark.parametrize("idx", range(len(CATALOGUE)))
def test_edmonds_agrees_with_hull(idx):
    name, h = CATALOGUE[idx]
    rng = random.Random(idx)
    for _ in range(100):
        x = random_vector(h, rng)
        a = edmonds_membership(h, x)
        b = hull_membership_oracle(h, x)
        assert a.inside == b.inside, (name, x)
        if not a.inside:
            assert a.violated.slack > 0


@given(st.integers(0, len(CATALOGUE) - 1), st.integers(0, 10_000), st.fractions(Fraction(1, 4), 1))
@settings(max_examples=120, deadline=None)
def test_monotone_under_shrinking(idx, seed, lam):
    _, h = CATALOGUE[idx]
    rng = random.Random(seed)
    x = random_vector(h, rng)
    if edmonds_membership(h, x, lam).inside:
        smaller = {e: v * Fraction(rng.randint(0, 4), 4) for e, v in x.items()}
        assert edmonds_membership(h, smaller, lam).inside


# -- fractional chromatic index -----------------------------------------------------------------

def test_chi_f_examples():
    assert fractional_chromatic_index(triangle()) == 3
    assert fractional_chromatic_index(Multigraph(range(2), [(0, 1)])) == 1
    assert fractional_chromatic_index(shannon_triangle(2)) == 6
    assert fractional_chromatic_index(Multigraph(range(3), [])) == 0


@pytest.mark.parametrize("mu", range(1, 5))
def test_shannon_chi_f(mu):
    assert fractional_chromatic_index(shannon_triangle(mu)) == 3 * mu


@pytest.mark.parametrize("idx", range(0, len(CATALOGUE), 3))
def test_chi_f_closed_form_matches_bisection(idx):
    _, h = CATALOGUE[idx]
    exact = fractional_chromatic_index(h)
    assert abs(fractional_chromatic_index_search(h) - float(exact)) <= 1e-8
    # the closed form lies exactly on the boundary
    assert edmonds_membership(h, constant(h, 1 / exact)).inside
    assert not edmonds_membership(h, constant(h, 1 / (exact - Fraction(1, 1000)))).inside


# -- certificate ---------------------------------------------------------------------------------

def test_k_zeta():
    assert k_zeta(0) == 0 and k_zeta(-3) == 0 and k_zeta(2) == 9


def test_single_edge_certificate():
    h = Multigraph(range(2), [(0, 1)])
    rep = lem_mp_certificate(h, {0: 1, 1: 1}, 4, 0, 0, {0: 6})
    assert rep.hypotheses_hold and rep.conclusion_holds and not rep.falsified
    assert rep.membership.inside


def test_h2_shortfall_reported():
    h = Multigraph(range(2), [(0, 1)])
    rep = lem_mp_certificate(h, {0: 1, 1: 1}, 4, 0, 0, {0: 5})
    assert not rep.hypotheses_hold
    assert rep.h2 == [(0, Fraction(1))]
    assert "H2'" in rep.summary()
    assert rep.conclusion_holds is None


def test_h1_and_h3_reported():
    h = Multigraph(range(3), [(0, 1), (1, 2)])
    rep = lem_mp_certificate(h, {0: 0, 1: 2, 2: 9}, 8, 0, 0, {0: 20, 1: 20})
    assert [v for v, _ in rep.h1] == [0, 2]
    assert rep.h3           # vertex 2 has sigma - d = 8 against a cut of 1


def random_certificate_instance(rng: random.Random):
    h = rng.choice(CATALOGUE)[1]
    zeta = rng.randint(0, 3)
    beta = max(h.degree(v) for v in h.vertices) + rng.randint(0, 6)
    sigma = {}
    for v in h.vertices:
        # spare capacity at most the cut plus zeta keeps every singleton dense enough
        spare = min(beta - h.degree(v), h.cut_size({v}) + zeta)
        sigma[v] = h.degree(v) + rng.randint(0, max(spare, 0))
    K = math.ceil(Fraction(9, 2) * zeta)
    b = {}
    for e in h.edges:
        need = Fraction(3, 2) * beta + K - (sigma[e.u] - h.degree(e.u)) - (sigma[e.v] - h.degree(e.v))
        b[e.eid] = need + Fraction(rng.randint(0, 4), 2)
    return h, sigma, beta, zeta, K, b


def test_random_certificates_confirm_membership():
    rng = random.Random(11)
    held = 0
    for _ in range(300):
        h, sigma, beta, zeta, K, b = random_certificate_instance(rng)
        rep = lem_mp_certificate(h, sigma, beta, zeta, K, b)
        if rep.hypotheses_hold:
            held += 1
            assert not rep.falsified, rep.summary()
            assert rep.half_beta_ok and rep.membership.inside
    assert held >= 100

from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from sigmacol.catalogue import (bipyramid, polyhedron, random_degenerate_graph, random_disjoint_sigma,
                                random_lists, random_planar_embedding, random_sigma, stacked_bipyramid, uniform_lists)
from sigmacol.colouring import (Colouring, PipelineParams, colouring_problems, contract_s2,
                                exact_list_sigma_colouring, exact_sigma_chromatic, free_colour,
                                greedy_sigma_colouring, pipeline_sigma_colour)
from sigmacol.graph_core import SimpleGraph, degeneracy_ordering
from sigmacol.sigma import SigmaSystem, gen_family, sigma_degree


def conflict_pairs(g: SimpleGraph, s: SigmaSystem) -> set[tuple[int, int]]:
    out = set(g.edges())
    for t in g.vertices:
        out |= {(min(a, b), max(a, b)) for a, b in combinations(s(t), 2)}
    return out


def list_size_for(g: SimpleGraph, s: SigmaSystem) -> int:
    return max(sigma_degree(g, s, v) for v in g.vertices) + 1


# -- validator ---------------------------------------------------------------------------------

@given(st.integers(3, 15), st.integers(0, 10_000))
@settings(max_examples=80, deadline=None)
def test_validator_matches_definition(n, seed):
    rng = random.Random(seed)
    g = random_planar_embedding(n, rng).graph
    s = random_sigma(g, rng)
    lists = random_lists(g.vertices, 3, 5, rng)
    col = {v: rng.randrange(5) for v in g.vertices}
    expected = (all(col[v] in lists[v] for v in g.vertices)
                and all(col[a] != col[b] for a, b in conflict_pairs(g, s)))
    c = Colouring.checked(g, s, col, lists)
    assert c.valid == expected
    assert c.valid == (colouring_problems(g, s, col, lists) == [])


def test_validator_flags_uncoloured_vertex():
    g = SimpleGraph(range(2), [(0, 1)])
    assert colouring_problems(g, SigmaSystem.empty(g), {0: 1}) == ["vertex 1 uncoloured"]


# -- greedy ----------------------------------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_cycle_greedy_with_three_colours(n):
    g = SimpleGraph(range(n), [(i, (i + 1) % n) for i in range(n)])
    s = SigmaSystem.empty(g)
    res = greedy_sigma_colouring(g, s, uniform_lists(g.vertices, 3))
    assert res.success and colouring_problems(g, s, res.colouring) == []


def test_disjoint_sigma_planar_greedy():
    rng = random.Random(8)
    for _ in range(100):
        g = random_planar_embedding(rng.randint(5, 40), rng).graph
        s = random_disjoint_sigma(g, rng)
        assert s.is_disjoint()
        lists = random_lists(g.vertices, s.beta + 6, s.beta + 12, rng)
        res = greedy_sigma_colouring(g, s, lists)
        assert res.success
        assert colouring_problems(g, s, res.colouring, lists) == []


def test_greedy_on_degenerate_disjoint_instances():
    rng = random.Random(51)
    failures = 0
    for _ in range(1000):
        g = random_degenerate_graph(rng.randint(2, 40), 5, rng)
        s = random_disjoint_sigma(g, rng)
        order = degeneracy_ordering(g)
        lists = random_lists(g.vertices, s.beta + order.q + 1, s.beta + order.q + 8, rng)
        res = greedy_sigma_colouring(g, s, lists, order)
        failures += not res.success
        if res.success:
            assert colouring_problems(g, s, res.colouring, lists) == []
    assert failures == 0


def test_subdivided_complete_five_needs_five():
    fam = gen_family("subdivided_complete", 5)
    g, s = fam.embedded.graph, fam.sigma
    lists = uniform_lists(g.vertices, 4)
    assert not greedy_sigma_colouring(g, s, lists).success
    assert exact_list_sigma_colouring(g, s, lists) is None
    assert exact_sigma_chromatic(g, s).value == 5


# -- exact -----------------------------------------------------------------------------------------

@pytest.mark.parametrize("n", [4, 5, 6])
def test_subdivided_complete_chromatic(n):
    fam = gen_family("subdivided_complete", n)
    res = exact_sigma_chromatic(fam.embedded.graph, fam.sigma)
    assert res.exact and res.value == n
    assert colouring_problems(fam.embedded.graph, fam.sigma, res.colouring) == []


def test_wegner4_chromatic():
    fam = gen_family("wegner", 4)
    res = exact_sigma_chromatic(fam.embedded.graph, fam.sigma)
    assert res.value == 13 == res.lower


def test_k4_empty_sigma():
    g = polyhedron("tetrahedron").graph
    assert exact_sigma_chromatic(g, SigmaSystem.empty(g)).value == 4


def brute_chromatic(g: SimpleGraph, s: SigmaSystem) -> int:
    pairs = conflict_pairs(g, s)
    vs = list(g.vertices)
    for k in range(1, len(vs) + 1):
        def go(i, col):
            if i == len(vs):
                return True
            v = vs[i]
            for c in range(k):
                if all(col.get(u) != c for a, b in pairs if v in (a, b) for u in (a, b) if u != v):
                    col[v] = c
                    if go(i + 1, col):
                        return True
                    del col[v]
            return False
        if go(0, {}):
            return k
    return 0


@given(st.integers(2, 9), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_exact_chromatic_matches_brute_force(n, seed):
    rng = random.Random(seed)
    g = random_planar_embedding(n, rng).graph
    s = random_sigma(g, rng)
    assert exact_sigma_chromatic(g, s).value == brute_chromatic(g, s)


# -- pipeline ---------------------------------------------------------------------------------------

def test_pipeline_s1_by_greedy():
    g = polyhedron("icosahedron")
    s = SigmaSystem.neighbourhoods(g.graph)
    lists = uniform_lists(g.vertices, list_size_for(g.graph, s))
    res = pipeline_sigma_colour(g, s, lists)
    assert res.success and "structure S1" in res.stages[0]
    assert not any("exact" in line for line in res.stages)


def test_pipeline_s2_contracts():
    # the stacked vertex has degree 3 and a single big neighbour once zeta is 5
    g = stacked_bipyramid(8)
    s = SigmaSystem.neighbourhoods(g.graph)
    lists = uniform_lists(g.vertices, list_size_for(g.graph, s))
    res = pipeline_sigma_colour(g, s, lists, PipelineParams(zeta=5))
    assert res.success
    assert "structure S2" in res.stages[0]
    assert any("S2: contract" in line for line in res.stages)
    assert any(line.startswith("  ") for line in res.stages)        # depth at least one
    assert exact_list_sigma_colouring(g.graph, s, lists) is not None


def test_pipeline_s3_through_reduction():
    g = bipyramid(28)
    s = SigmaSystem.neighbourhoods(g.graph)
    lists = random_lists(g.vertices, list_size_for(g.graph, s) + 2, 40, random.Random(4))
    res = pipeline_sigma_colour(g, s, lists, PipelineParams(zeta=5))
    assert res.success, res.failure
    assert "structure S3" in res.stages[0]
    assert any("H coloured" in line or "exact edge-colouring" in line for line in res.stages)
    assert colouring_problems(g.graph, s, res.colouring, lists) == []
    assert exact_list_sigma_colouring(g.graph, s, lists) is not None


def test_pipeline_needs_every_list():
    g = polyhedron("tetrahedron")
    with pytest.raises(ValueError):
        pipeline_sigma_colour(g, SigmaSystem.empty(g.graph), {0: {1}})


@given(st.integers(4, 20), st.integers(2, 5), st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_pipeline_agrees_with_exact_on_feasibility(n, k, seed):
    rng = random.Random(seed)
    g = random_planar_embedding(n, rng)
    s = random_sigma(g.graph, rng)
    lists = random_lists(g.vertices, k, k + 2, rng)
    exact = exact_list_sigma_colouring(g.graph, s, lists)
    res = pipeline_sigma_colour(g, s, lists, PipelineParams(zeta=rng.choice([3, 5, 8])))
    if res.success:
        assert colouring_problems(g.graph, s, res.colouring, lists) == []
    if exact is None:
        assert not res.success


@given(st.integers(5, 25), st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_s2_contraction_lifts_colourings(n, seed):
    rng = random.Random(seed)
    g = random_planar_embedding(n, rng)
    s = random_sigma(g.graph, rng)
    keep, gone = rng.choice(sorted(g.graph.edges()))
    g2, s2 = contract_s2(g, s, keep, gone)
    lists = uniform_lists(g.vertices, list_size_for(g.graph, s))
    col = exact_list_sigma_colouring(g2.graph, s2, lists)
    assert col is not None
    c = free_colour(g.graph, s, col, gone, lists)
    assert c is not None
    col[gone] = c
    assert colouring_problems(g.graph, s, col, lists) == []


def test_clique_matching_prune_settles_large_clique_quickly():
    # bipyramid(18) with neighbourhood Sigma has a conflict clique on all 20 vertices
    g = bipyramid(18).graph
    s = SigmaSystem.neighbourhoods(g)
    assert exact_list_sigma_colouring(g, s, uniform_lists(g.vertices, 19), budget=50) is None
    col = exact_list_sigma_colouring(g, s, uniform_lists(g.vertices, 20), budget=50)
    assert colouring_problems(g, s, col) == []

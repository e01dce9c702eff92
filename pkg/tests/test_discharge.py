from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from sigmacol.catalogue import bipyramid, polyhedron, random_maximal_planar, wheel
from sigmacol.discharge import (StructureWitness, big_vertices, classify, compute_charges, density_slack,
                                detect_structure, find_violation, refine, validate_witness, zeta_star)
from sigmacol.graph_core import SimpleGraph, complete_to_edge_maximal
from sigmacol.sigma import gen_family

# receiver degree, big neighbours -> amount from each big neighbour, written out by hand
HAND_RULES = {(3, 3): 6, (3, 2): 9, (4, 4): 3, (4, 3): 4, (4, 2): 6}


def expected_final(g: SimpleGraph, zeta: int) -> dict[int, int]:
    big = {v for v in g.vertices if g.degree(v) > zeta}
    charge = {v: 6 * g.degree(v) - 36 for v in g.vertices}
    for v in g.vertices:
        nb = [u for u in g.neighbours(v) if u in big]
        d = g.degree(v)
        if d == 5:
            amount = 3 if nb else 0
        else:
            amount = HAND_RULES.get((d, len(nb)), 0)
        for u in nb:
            charge[u] -= amount
            charge[v] += amount
    return charge


def wegner_wrapper(k: int):
    return complete_to_edge_maximal(gen_family("wegner", k).embedded)


# -- charges ------------------------------------------------------------------------------

def test_zeta_star_values():
    assert zeta_star(2) == 132 and zeta_star(0) == 396


def test_k4_charges():
    led = compute_charges(polyhedron("tetrahedron"), 132)
    assert set(led.initial.values()) == {-18}
    assert led.transfers == []
    assert led.total_final() == -72


def test_icosahedron_charges():
    led = compute_charges(polyhedron("icosahedron"), 132)
    assert set(led.initial.values()) == {-6}
    assert led.transfers == [] and led.total_final() == -72


def test_wegner70_wrapper_rule_r5():
    g = wegner_wrapper(70)
    sg = g.graph
    fam = gen_family("wegner", 70)
    big = big_vertices(sg, 132)
    assert {fam.labels[n][0] for n in "xyz"} <= big
    led = compute_charges(g, 132)
    receivers = [v for v in sg.vertices if sg.degree(v) == 4 and len(sg.neighbours(v) & big) == 2]
    assert receivers
    for v in receivers:
        got = led.transfers_to(v)
        assert [t.amount for t in got] == [6, 6] and {t.rule for t in got} == {"R5"}
    assert led.final == expected_final(sg, 132)
    assert led.total_initial() == led.total_final() == -72


@given(st.integers(4, 120), st.sampled_from([3, 5, 8, 12, 20, 132]), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_charge_identities(n, zeta, seed):
    g = random_maximal_planar(n, random.Random(seed))
    sg = g.graph
    led = compute_charges(g, zeta)
    assert led.total_initial() == 12 * sg.m - 36 * sg.n == -72
    assert led.total_final() == led.total_initial()
    assert led.final == expected_final(sg, zeta)
    big = big_vertices(sg, zeta)
    for t in led.transfers:
        assert t.src in big and sg.has_edge(t.src, t.dst)


def test_ledger_csv_columns():
    csv = compute_charges(bipyramid(8), 5).to_csv().splitlines()
    assert csv[0] == "vertex,initial,final,transfers"
    assert len(csv) == 11
    # ring vertices: degree 4 with two big hubs, receive 6 from each
    assert csv[3] == "2,-12,0,2"


# -- classification -----------------------------------------------------------------------

def test_classification_partitions_neighbourhoods():
    g = wegner_wrapper(20)
    classes = classify(g, 12)
    for v, parts in classes.items():
        members = [u for part in parts.values() for u in part]
        assert sorted(members) == sorted(g.graph.neighbours(v))


def test_bipyramid_ring_is_m4b():
    g = bipyramid(10)
    classes = classify(g, 5)
    assert set(classes) == {0, 1}
    assert classes[0]["M4b"] == frozenset(range(2, 12))


# -- detection ------------------------------------------------------------------------------

def test_low_degree_gives_s1():
    assert detect_structure(polyhedron("dodecahedron"), 10).kind == "S1"
    assert detect_structure(polyhedron("icosahedron"), 132).kind == "S1"


def test_s1_witness_valid_on_k4():
    k4 = polyhedron("tetrahedron")
    w = detect_structure(k4, 132)
    assert w.kind == "S1" and validate_witness(k4, w).valid


def test_wheel_gives_s2():
    w = detect_structure(wheel(9), 5)
    assert w.kind == "S2" and w.s2 == (1, 0)
    assert validate_witness(wheel(9), w).valid


def test_bipyramid_gives_s3():
    g = bipyramid(8)
    w = detect_structure(g, 5)
    assert w.kind == "S3"
    assert w.X == {0, 1} and w.Y == frozenset(range(2, 10))
    assert not (w.X & w.Y)
    assert validate_witness(g, w).valid


def test_wegner200_wrapper_witness_validates():
    g = wegner_wrapper(200)
    w = detect_structure(g, 132)
    assert w.kind in ("S2", "S3")
    rep = validate_witness(g, w)
    assert rep.valid, str(rep)


def test_detection_is_deterministic():
    g = wegner_wrapper(60)
    assert detect_structure(g, 20) == detect_structure(g, 20)


@given(st.integers(10, 80), st.sampled_from([8, 12, 20]), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_detected_witnesses_validate(n, zeta, seed):
    g = random_maximal_planar(n, random.Random(seed))
    w = detect_structure(g, zeta)
    if g.graph.max_degree() <= zeta:
        assert w.kind == "S1"
    if w.kind in ("S1", "S2", "S3"):
        assert validate_witness(g, w).valid
    if w.kind == "S3":
        assert w.X and w.Y and not (w.X & w.Y)


# -- validation -------------------------------------------------------------------------------

def test_degree_five_y_vertex_breaks_clause_i():
    g = bipyramid(8)
    w = detect_structure(g, 5)
    edges = list(g.graph.edges()) + [(2, 4)]       # ring vertices 2 and 4 now have degree 5
    bad = SimpleGraph(g.vertices, edges)
    rep = validate_witness(bad, w)
    assert not rep.valid
    assert "i" in rep.clauses()


def test_clause_ii_detected():
    # X = {a, b, c}; adjacent y1, y2 with X^y1 = {a, b} and X^y2 = {b, c}
    a, b, c, y1, y2, w1, w2, f1, f2, f3 = range(10)
    edges = [(y1, a), (y1, b), (y1, y2), (y1, w1), (y2, b), (y2, c), (y2, w2),
             (w1, f1), (w1, f2), (w1, f3), (w2, f1), (w2, f2), (w2, f3), (a, f1), (c, f1)]
    g = SimpleGraph(range(10), edges)
    w = StructureWitness("S3", 1, X=frozenset({a, b, c}), Y=frozenset({y1, y2}),
                         xy={y1: (a, b), y2: (b, c)})
    rep = validate_witness(g, w)
    assert "ii" in rep.clauses() and "i" not in rep.clauses()
    assert "S3" in validate_witness(g, StructureWitness("S3", 1, X=frozenset(), Y=w.Y)).clauses()


def test_clause_iii_detected_when_zeta_too_small():
    g = bipyramid(8)
    w = detect_structure(g, 5)
    # the hubs are not adjacent and W = X has Y^W = Y, so the slack is 2 zeta
    assert density_slack(g.graph, w.X, w.Y, w.X, -1) == -2
    rep = validate_witness(g, w, zeta=-1)
    assert rep.clauses() == {"iii"}


def test_singleton_density_unfolds():
    g = bipyramid(8).graph
    X, Y = {0, 1}, set(range(2, 10))
    for v in X:
        inside_y = len(g.neighbours(v) & Y)
        # Y^{v} is empty, so the right side is e(v, Y) + zeta and the left side d(v) - e(v, Y)
        assert density_slack(g, X, Y, {v}, 5) == inside_y + 5 - (g.degree(v) - inside_y)


def brute_violation(g, X, Y, zeta):
    for k in range(1, len(X) + 1):
        for W in combinations(sorted(X), k):
            if density_slack(g, X, Y, W, zeta) < 0:
                yield frozenset(W)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_violation_search_matches_definition(seed):
    rng = random.Random(seed)
    g = random_maximal_planar(rng.randint(8, 40), rng).graph
    X = set(rng.sample(list(g.vertices), rng.randint(1, 6)))
    Y = {v for v in g.vertices if v not in X and len(g.neighbours(v) & X) == 2 and rng.random() < 0.8}
    zeta = rng.randint(0, 6)
    z, mode = find_violation(g, X, Y, zeta)
    violators = sorted(brute_violation(g, X, Y, zeta), key=sorted)
    assert mode == "exhaustive"
    if violators:
        assert z == violators[0]
        assert density_slack(g, X, Y, z, zeta) < 0
    else:
        assert z is None


def test_refine_leaves_density_satisfied():
    rng = random.Random(3)
    for _ in range(20):
        g = random_maximal_planar(30, rng).graph
        X = frozenset(rng.sample(list(g.vertices), 4))
        Y = frozenset(v for v in g.vertices if v not in X and len(g.neighbours(v) & X) == 2)
        X2, Y2, _ = refine(g, X, Y, 2)
        assert X2 <= X and Y2 <= Y
        if X2 and Y2:
            assert find_violation(g, X2, Y2, 2)[0] is None


def test_witness_text_round_trip():
    g = bipyramid(8)
    for w in (detect_structure(g, 5), detect_structure(wheel(9), 5), detect_structure(g, 20)):
        assert StructureWitness.from_text(w.to_text()) == StructureWitness(w.kind, w.zeta, w.s2, w.X, w.Y, w.xy)


def test_witness_text_rejects_garbage():
    with pytest.raises(ValueError):
        StructureWitness.from_text("kind S3\nbogus 1\n")

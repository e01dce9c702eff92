"""One test per acceptance criterion; the terminal summary prints a PASS/FAIL line for each."""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import pytest

from sigmacol.catalogue import (bipyramid, multigraph_catalogue, random_degenerate_graph, random_disjoint_sigma,
                                random_lists, random_maximal_planar, random_planar_embedding, random_sigma,
                                shannon_triangle, stacked_bipyramid, uniform_lists)
from sigmacol.colouring import (PipelineParams, colouring_problems, exact_list_sigma_colouring,
                                exact_sigma_chromatic, greedy_sigma_colouring, pipeline_sigma_colour)
from sigmacol.discharge import compute_charges, detect_structure, validate_witness
from sigmacol.graph_core import degeneracy_ordering
from sigmacol.hardcore import HardcoreModel, activities_from_marginals, stationarity_residual
from sigmacol.kahn import KahnParams, edge_colouring_problems, run as kahn_run
from sigmacol.polytope import (edmonds_membership, fractional_chromatic_index, fractional_chromatic_index_search,
                               hull_membership_oracle, lem_mp_certificate)
from sigmacol.sigma import (SigmaSystem, clique_bound_violation, cyclic_clique_number, cyclic_instance,
                            gen_family, sigma_clique_number, square)

CATALOGUE = multigraph_catalogue()


class Clock:
    def __init__(self, limit: float):
        self.limit = limit
        self.start = time.perf_counter()

    def check(self, record) -> float:
        spent = time.perf_counter() - self.start
        record("seconds", f"{spent:.1f}")
        assert spent < self.limit, f"took {spent:.1f}s, limit {self.limit}s"
        return spent


def edge_colouring_ok(h, lists, col) -> bool:
    """Independent check: complete, from the lists, and no colour twice at any vertex."""
    if set(col) != set(h.edge_ids) or any(col[e] not in lists[e] for e in col):
        return False
    return all(len({col[e.eid] for e in h.incident(v)}) == len(list(h.incident(v))) for v in h.vertices)


def test_criterion_01_wegner(record_property):
    """[1] Wegner family: max degree 2k, square clique 3k+1, chromatic 3k+1 for k <= 5"""
    clock = Clock(60)
    for k in range(2, 11):
        fam = gen_family("wegner", k)
        g = fam.embedded.graph
        assert g.max_degree() == 2 * k
        sq = square(g)
        assert sigma_clique_number(sq, SigmaSystem.empty(sq)).size == 3 * k + 1
        if k <= 5:
            res = exact_sigma_chromatic(g, fam.sigma)
            assert res.exact and res.value == 3 * k + 1
    clock.check(record_property)


def test_criterion_02_borodin(record_property):
    """[2] Borodin family: max face order 2k, three such faces, cyclic clique 3k"""
    clock = Clock(30)
    for k in range(2, 9):
        emb = gen_family("borodin", k).embedded
        orders = sorted((f.degree for f in emb.faces()), reverse=True)
        assert orders[0] == 2 * k
        assert orders[:3] == [2 * k] * 3 and (len(orders) == 3 or orders[3] < 2 * k)
        inst = cyclic_instance(emb)
        assert inst.delta_star == 2 * k
        assert cyclic_clique_number(inst).size == 3 * k
    clock.check(record_property)


def random_vector(h, rng: random.Random) -> dict[int, Fraction]:
    top = rng.choice([2, 3, 4, 6])
    return {eid: Fraction(rng.randint(0, 12), 12 * top) * rng.choice([1, 1, 2]) for eid in h.edge_ids}


def test_criterion_03_edmonds_equivalence(record_property):
    """[3] Edmonds membership agrees with the convex-hull oracle on 60 multigraphs x 100 vectors"""
    clock = Clock(300)
    assert len(CATALOGUE) >= 50
    assert all(len(h.vertices) <= 5 and len(h.edges) <= 8 and h.is_connected() for _, h in CATALOGUE)
    agree = inside = 0
    for idx, (name, h) in enumerate(CATALOGUE):
        rng = random.Random(idx)
        for _ in range(100):
            x = random_vector(h, rng)
            a, b = edmonds_membership(h, x), hull_membership_oracle(h, x)
            assert a.inside == b.inside, (name, x)
            agree += 1
            inside += a.inside
    record_property("instances", agree)
    record_property("inside", inside)
    clock.check(record_property)


def test_criterion_04_fractional_chromatic_index(record_property):
    """[4] Fractional chromatic index: Shannon triangles give 3mu; closed form matches bisection"""
    clock = Clock(60)
    for mu in range(1, 5):
        assert fractional_chromatic_index(shannon_triangle(mu)) == 3 * mu
    worst = 0.0
    for _, h in CATALOGUE:
        gap = abs(fractional_chromatic_index_search(h, 1e-10) - float(fractional_chromatic_index(h)))
        worst = max(worst, gap)
    assert worst <= 1e-9
    record_property("max_gap", f"{worst:.1e}")
    clock.check(record_property)


def test_criterion_05_hardcore_round_trip(record_property):
    """[5] Hardcore round trip: refitted activities within 1e-6, stationarity within 1e-8"""
    clock = Clock(300)
    worst_lam = worst_res = 0.0
    for idx, (_, h) in enumerate(CATALOGUE):
        rng = random.Random(500 + idx)
        lam = {e: Fraction(rng.uniform(0.1, 2.0)) for e in h.edge_ids}
        x = HardcoreModel(h, lam, exact=True).marginals()
        fitted = activities_from_marginals(h, x, 1e-9)
        worst_lam = max(worst_lam, max(abs(fitted[e] - float(lam[e])) for e in h.edge_ids))
        worst_res = max(worst_res, stationarity_residual(h, fitted, x))
    assert worst_lam <= 1e-6 and worst_res <= 1e-8
    record_property("max_lambda_error", f"{worst_lam:.1e}")
    record_property("max_residual", f"{worst_res:.1e}")
    clock.check(record_property)


def certificate_instance(rng: random.Random):
    h = rng.choice(CATALOGUE)[1]
    zeta = rng.randint(0, 3)
    beta = h.max_degree() + rng.randint(0, 6)
    sigma = {}
    for v in h.vertices:
        spare = min(beta - h.degree(v), h.cut_size({v}) + zeta)
        sigma[v] = h.degree(v) + rng.randint(0, max(spare, 0))
    K = max(0, math.ceil(Fraction(9, 2) * zeta))
    b = {}
    for e in h.edges:
        need = Fraction(3, 2) * beta + K - (sigma[e.u] - h.degree(e.u)) - (sigma[e.v] - h.degree(e.v))
        b[e.eid] = need + Fraction(rng.randint(0, 4), 2)
    return h, sigma, beta, zeta, K, b


def test_criterion_06_certificate(record_property):
    """[6] Scaled-marginal certificate: 500 instances meeting the hypotheses, zero falsifications"""
    clock = Clock(300)
    rng = random.Random(2026)
    held = tried = 0
    while held < 500:
        tried += 1
        rep = lem_mp_certificate(*certificate_instance(rng))
        if not rep.hypotheses_hold:
            continue
        held += 1
        assert not rep.falsified, rep.summary()
        assert rep.half_beta_ok and rep.membership.inside
    record_property("instances", held)
    record_property("sampled", tried)
    clock.check(record_property)


def test_criterion_07_kahn_soundness(record_property):
    """[7] Kahn engine: 200 runs with lists >= 2 Delta all succeed; tight-list successes all validate"""
    clock = Clock(600)
    for run in range(200):
        _, h = CATALOGUE[run % len(CATALOGUE)]
        rng = random.Random(run)
        lists = random_lists(h.edge_ids, 2 * h.max_degree(), 3 * h.max_degree(), rng)
        res = kahn_run(h, lists, KahnParams(seed=run))
        assert res.success
        assert edge_colouring_ok(h, lists, res.colouring) and not edge_colouring_problems(h, lists, res.colouring)
    wins = 0
    for run in range(200):
        _, h = CATALOGUE[run % len(CATALOGUE)]
        k = math.ceil(Fraction(6, 5) * fractional_chromatic_index(h))
        lists = uniform_lists(h.edge_ids, k)
        res = kahn_run(h, lists, KahnParams(seed=run, eager_finish=False))
        if res.success:
            wins += 1
            assert edge_colouring_ok(h, lists, res.colouring)
    record_property("tight_success_rate", f"{wins}/200")
    clock.check(record_property)


def test_criterion_08_discharging(record_property):
    """[8] Discharging: total charge -72 and conserved; S1 below zeta; every S2/S3 witness validates"""
    clock = Clock(300)
    rng = random.Random(8)
    kinds: dict[str, int] = {}
    for _ in range(100):
        n = rng.randint(4, 200)
        g = random_maximal_planar(n, rng)
        sg = g.graph
        assert sg.m == 3 * n - 6
        led = compute_charges(g, 132)
        assert led.total_initial() == 12 * sg.m - 36 * sg.n == -72
        assert led.total_final() == -72
        if sg.max_degree() <= 132:
            assert detect_structure(g, 132).kind == "S1"
        for zeta in (8, 12, 20):
            w = detect_structure(g, zeta)
            kinds[w.kind] = kinds.get(w.kind, 0) + 1
            if w.kind in ("S2", "S3"):
                assert validate_witness(g, w).valid
    record_property("kinds", ",".join(f"{k}:{v}" for k, v in sorted(kinds.items())))
    clock.check(record_property)


def test_criterion_09_disjoint_greedy(record_property):
    """[9] Greedy succeeds on 1000 disjoint-Sigma instances with lists beta + q + 1"""
    clock = Clock(120)
    rng = random.Random(9)
    failures = 0
    for _ in range(1000):
        g = random_degenerate_graph(rng.randint(2, 60), rng.randint(1, 5), rng)
        s = random_disjoint_sigma(g, rng)
        order = degeneracy_ordering(g)
        assert order.q <= 5 and s.is_disjoint()
        lists = random_lists(g.vertices, s.beta + order.q + 1, s.beta + order.q + 10, rng)
        res = greedy_sigma_colouring(g, s, lists, order)
        failures += not res.success
        if res.success:
            assert colouring_problems(g, s, res.colouring, lists) == []
    assert failures == 0
    record_property("failures", failures)
    clock.check(record_property)


def test_criterion_10_subdivided_complete(record_property):
    """[10] Subdivided K_n: chromatic number n, greedy with three colours fails"""
    clock = Clock(120)
    for n in (4, 5, 6):
        fam = gen_family("subdivided_complete", n)
        g, s = fam.embedded.graph, fam.sigma
        res = exact_sigma_chromatic(g, s)
        assert res.exact and res.value == n
        assert not greedy_sigma_colouring(g, s, uniform_lists(g.vertices, 3)).success
    clock.check(record_property)


def pipeline_gadgets():
    """Constructed instances that force the S2 and S3 paths at zeta = 5."""
    out = []
    for m in (8, 12):
        g = stacked_bipyramid(m)
        out.append((g, SigmaSystem.neighbourhoods(g.graph)))
    for m in (8, 13, 18):
        g = bipyramid(m)
        out.append((g, SigmaSystem.neighbourhoods(g.graph)))
    return out


def test_criterion_11_pipeline_soundness(record_property):
    """[11] Pipeline output always validates and never contradicts exact infeasibility"""
    clock = Clock(600)
    rng = random.Random(11)
    cases = []
    for _ in range(50):
        g = random_planar_embedding(rng.randint(4, 20), rng)
        s = random_sigma(g.graph, rng)
        cases.append((g, s, rng.choice([3, 5, 8, 132])))
    for g, s in pipeline_gadgets():
        assert g.graph.n <= 20
        cases.append((g, s, 5))
    stats = {"success": 0, "infeasible": 0, "failed": 0}
    paths: set[str] = set()
    for g, s, zeta in cases:
        k = rng.randint(2, s.beta + 4)
        lists = random_lists(g.vertices, k, k + rng.randint(0, 4), rng)
        exact = exact_list_sigma_colouring(g.graph, s, lists)
        res = pipeline_sigma_colour(g, s, lists, PipelineParams(zeta=zeta, seed=7))
        paths.update(line.split("structure ")[-1] for line in res.stages if "structure" in line)
        if res.success:
            stats["success"] += 1
            assert colouring_problems(g.graph, s, res.colouring, lists) == []
        if exact is None:
            stats["infeasible"] += 1
            assert not res.success
        elif not res.success:
            stats["failed"] += 1
    assert {"S2", "S3"} <= paths
    record_property("outcomes", ",".join(f"{k}:{v}" for k, v in stats.items()))
    clock.check(record_property)


def test_criterion_12_clique_bound(record_property):
    """[12] Every generated planar instance has omega <= (3/2) beta + 76"""
    clock = Clock(300)
    rng = random.Random(12)
    checked = 0
    instances = [gen_family("wegner", k) for k in range(2, 11)]
    pairs = [(f.embedded.graph, f.sigma) for f in instances]
    for k in range(2, 9):
        inst = cyclic_instance(gen_family("borodin", k).embedded)
        pairs.append((inst.graph, inst.sigma))
    for m in (8, 12, 20):
        g = bipyramid(m).graph
        pairs.append((g, SigmaSystem.neighbourhoods(g)))
    for _ in range(40):
        g = random_planar_embedding(rng.randint(4, 40), rng).graph
        pairs.append((g, random_sigma(g, rng)))
        pairs.append((g, SigmaSystem.neighbourhoods(g)))
    for g, s in pairs:
        assert clique_bound_violation(g, s) is None
        checked += 1
    record_property("instances", checked)
    clock.check(record_property)

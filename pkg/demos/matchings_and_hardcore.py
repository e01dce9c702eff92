"""Matching polytope membership, fractional chromatic index and the hardcore model on matchings.

Run with `python demos/matchings_and_hardcore.py`.
"""

from __future__ import annotations

from fractions import Fraction

from sigmacol.catalogue import shannon_triangle
from sigmacol.graph_core import Multigraph
from sigmacol.hardcore import HardcoreModel, activities_from_marginals, sample_matching
from sigmacol.polytope import edmonds_membership, fractional_chromatic_index

TRIANGLE = Multigraph(range(3), [(0, 1), (1, 2), (0, 2)])


def membership() -> None:
    print("Odd-set constraints cut off the uniform half on a triangle")
    for v in (Fraction(1, 3), Fraction(1, 2)):
        rep = edmonds_membership(TRIANGLE, {e: v for e in TRIANGLE.edge_ids})
        print(f"  x = {v}: inside={rep.inside}  {rep.violated or ''}")


def fractional_index() -> None:
    print("Shannon triangles reach 3 mu, the largest value for maximum degree 2 mu")
    for mu in range(1, 5):
        print(f"  mu={mu}  chi'_f={fractional_chromatic_index(shannon_triangle(mu))}")


def hardcore() -> None:
    print("Fit activities to marginals, then sample matchings")
    x = {e: Fraction(1, 5) for e in TRIANGLE.edge_ids}
    lam = activities_from_marginals(TRIANGLE, x, 0.1)
    print(f"  marginals 1/5 need activity {lam[0]:.6f} on each edge")
    m = HardcoreModel(TRIANGLE, lam)
    draws = sample_matching(m, 1, 20_000)
    freq = sum(1 for M in draws if 0 in M) / len(draws)
    print(f"  edge 0 appears in {freq:.3f} of 20000 samples")


if __name__ == "__main__":
    membership()
    fractional_index()
    hardcore()

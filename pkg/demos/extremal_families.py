"""Walk through the extremal families: the square of Wegner graphs and Borodin's cyclic instances.

Run with `python demos/extremal_families.py`.
"""

from __future__ import annotations

from sigmacol.colouring import exact_sigma_chromatic, greedy_sigma_colouring
from sigmacol.catalogue import uniform_lists
from sigmacol.sigma import SigmaSystem, cyclic_clique_number, cyclic_instance, gen_family, sigma_clique_number, square


def wegner() -> None:
    print("Wegner graphs: degree 2k, and the square needs 3k + 1 colours")
    for k in range(2, 6):
        fam = gen_family("wegner", k)
        g = fam.embedded.graph
        sq = square(g)
        omega = sigma_clique_number(sq, SigmaSystem.empty(sq)).size
        chi = exact_sigma_chromatic(g, fam.sigma).value
        print(f"  k={k}  n={g.n:3d}  degree={g.max_degree():2d}  clique={omega:2d}  chromatic={chi:2d}")


def borodin() -> None:
    print("Borodin instances: three faces of order 2k force a cyclic clique of 3k")
    for k in range(2, 7):
        inst = cyclic_instance(gen_family("borodin", k).embedded)
        print(f"  k={k}  largest face={inst.delta_star:2d}  cyclic clique={cyclic_clique_number(inst).size:2d}")


def subdivided() -> None:
    print("Subdivided complete graphs: chromatic number n, yet greedy with three colours gets stuck")
    for n in (4, 5, 6):
        fam = gen_family("subdivided_complete", n)
        g, s = fam.embedded.graph, fam.sigma
        res = greedy_sigma_colouring(g, s, uniform_lists(g.vertices, 3))
        print(f"  n={n}  chromatic={exact_sigma_chromatic(g, s).value}  greedy stuck at vertex {res.failed_at}")


if __name__ == "__main__":
    wegner()
    borodin()
    subdivided()

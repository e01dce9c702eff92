"""From discharging to a finished list colouring on a planar gadget with two big hubs.

Run with `python demos/colouring_pipeline.py`.
"""

from __future__ import annotations

import random

from sigmacol.catalogue import bipyramid, random_lists
from sigmacol.colouring import PipelineParams, colouring_problems, exact_list_sigma_colouring, pipeline_sigma_colour
from sigmacol.discharge import compute_charges, detect_structure, validate_witness
from sigmacol.kahn import KahnParams, run as kahn_run
from sigmacol.reduction import build_matching_instance, build_reduced_instance, extend_colouring
from sigmacol.sigma import SigmaSystem

ZETA = 5


def main() -> None:
    g = bipyramid(12)
    s = SigmaSystem.neighbourhoods(g.graph)
    lists = random_lists(g.vertices, s.beta + 4, s.beta + 8, random.Random(3))
    print(f"bipyramid on {g.graph.n} vertices, beta={s.beta}")

    led = compute_charges(g, ZETA)
    print(f"charges: initial total {led.total_initial()}, final total {led.total_final()}")

    w = detect_structure(g, ZETA)
    print(f"structure {w.kind}: X={sorted(w.X)}  |Y|={len(w.Y)}  valid={validate_witness(g, w).valid}")

    red = build_reduced_instance(g, s, w, s.beta)
    print(f"reduced graph G0 has {red.g0.n} vertices after {len(red.trace)} moves")
    c0 = exact_list_sigma_colouring(red.g0, red.sigma0, lists)

    mi = build_matching_instance(g, s, w, c0, lists)
    print(f"matching instance H: {len(mi.h.edges)} edges, shortest list {min(map(len, mi.lists.values()))}")
    res = kahn_run(mi.h, mi.lists, KahnParams(seed=1))
    print(f"edge colouring of H by path {res.path!r}")

    full = extend_colouring(c0, res.colouring, mi.origin, g, s, lists)
    print(f"extended colouring problems: {colouring_problems(g.graph, s, full, lists)}")

    print("the same instance through the pipeline:")
    out = pipeline_sigma_colour(g, s, lists, PipelineParams(zeta=ZETA, seed=1))
    for line in out.stages:
        print("  " + line)
    print(f"success={out.success}")


if __name__ == "__main__":
    main()

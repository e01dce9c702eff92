"""Command-line entry point: ``sigmacol <verb> ...``.

Exit status 0 on success, 1 on usage errors, 2 when an input or result fails validation.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction

from . import __version__
from .catalogue import (bipyramid, random_disjoint_sigma, random_planar_embedding, random_sigma, shannon_triangle,
                        uniform_lists, wheel)
from .colouring import (PipelineParams, colouring_problems, exact_list_sigma_colouring, exact_sigma_chromatic,
                        greedy_sigma_colouring, pipeline_sigma_colour)
from .discharge import StructureWitness, compute_charges, detect_structure, validate_witness, zeta_star
from .formats import (Document, FormatError, colouring_doc, dumps, embedded_doc, multigraph_doc, read)
from .graph_core import PreconditionError, StructuralError, complete_to_edge_maximal, euler_residual
from .hardcore import FitError, HardcoreModel, activities_from_marginals, substream
from .kahn import KahnParams, edge_colouring_problems, run as kahn_run
from .polytope import edmonds_membership, fractional_chromatic_index
from .reduction import InvariantError, ReductionError, build_matching_instance, build_reduced_instance
from .sigma import (SigmaSystem, cyclic_clique_number, cyclic_instance, gen_family, sigma_clique_number,
                    sigma_degree, square)

THREADS_ENV = "SIGMA_COLOUR_THREADS"


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--zeta", type=int, default=None)
    p.add_argument("--beta", type=int, default=None)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("-o", "--output", default=None)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="sigmacol", description="Sigma-colouring toolkit")
    top.add_argument("--version", action="version", version=f"sigmacol {__version__}")
    verbs = top.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = verbs.add_parser("gen", help="generate an instance")
    p.add_argument("family", choices=["wegner", "borodin", "subdivided_complete", "bipyramid", "wheel",
                                      "random-planar", "shannon"])
    p.add_argument("--k", type=int, default=3, help="family parameter (shannon: multiplicity)")
    p.add_argument("--n", type=int, default=12, help="vertices for random-planar")
    p.add_argument("--sigma", choices=["family", "none", "full", "random", "disjoint"], default="family")
    _common(p)

    p = verbs.add_parser("check", help="validate a file and any colouring in it")
    p.add_argument("input")
    p.add_argument("--witness", default=None)
    p.add_argument("--lists", default=None)
    _common(p)

    p = verbs.add_parser("clique", help="maximum Sigma-clique")
    p.add_argument("input")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--square", action="store_true")
    mode.add_argument("--cyclic", action="store_true")
    _common(p)

    p = verbs.add_parser("colour", help="Sigma-colour an instance")
    p.add_argument("input")
    p.add_argument("--mode", choices=["greedy", "exact", "pipeline"], default="exact")
    p.add_argument("--lists", default=None)
    p.add_argument("--colours", type=int, default=None)
    _common(p)

    p = verbs.add_parser("discharge", help="discharging: structure detection or charge ledger")
    p.add_argument("action", choices=["detect", "ledger"])
    p.add_argument("input")
    p.add_argument("--complete", action="store_true", help="complete to edge-maximal first")
    _common(p)

    p = verbs.add_parser("reduce", help="reduced instance G0, or the matching instance given a colouring of G0")
    p.add_argument("input")
    p.add_argument("--partial", default=None)
    p.add_argument("--lists", default=None)
    p.add_argument("--colours", type=int, default=None)
    _common(p)

    p = verbs.add_parser("polytope", help="matching polytope tools")
    p.add_argument("action", choices=["member", "chi-f"])
    p.add_argument("input")
    p.add_argument("--scale", type=Fraction, default=Fraction(1))
    _common(p)

    p = verbs.add_parser("hardcore", help="hardcore distributions on matchings")
    p.add_argument("action", choices=["fit", "sample", "marginals"])
    p.add_argument("input")
    p.add_argument("-n", type=int, default=1000)
    _common(p)

    p = verbs.add_parser("kahn", help="randomized list edge-colouring of a matching instance")
    p.add_argument("action", choices=["run"])
    p.add_argument("input")
    p.add_argument("--retries", type=int, default=5)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--no-eager", action="store_true")
    p.add_argument("--telemetry", default=None)
    _common(p)

    p = verbs.add_parser("report", help="summary statistics of an instance")
    p.add_argument("input")
    _common(p)
    return top


# -- helpers -------------------------------------------------------------------------------

def header(args: argparse.Namespace) -> str:
    flags = {k: v for k, v in vars(args).items() if k != "verb"}
    lines = [f"# sigmacol {__version__}", f"# verb {args.verb}", f"# seed {args.seed}",
             "# flags " + " ".join(f"{k}={flags[k]}" for k in sorted(flags))]
    return "\n".join(lines) + "\n"


def _graph(doc: Document):
    if doc.is_embedded:
        emb = doc.embedded()
        return emb, emb.graph
    return None, doc.simple_graph()


def _lists(args, doc: Document, keys, default_k: int | None = None) -> dict[int, frozenset[int]] | None:
    if getattr(args, "lists", None):
        return read(args.lists).list_assignment()
    if doc.lists:
        return doc.list_assignment()
    k = getattr(args, "colours", None) or default_k
    return None if k is None else uniform_lists(keys, k)


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _zeta(args, emb) -> int:
    return args.zeta if args.zeta is not None else zeta_star(emb.surface_chi if emb is not None else 2)


# -- verbs -------------------------------------------------------------------------------

def cmd_gen(args) -> str:
    rng = random.Random(args.seed)
    if args.family == "shannon":
        return dumps(multigraph_doc(shannon_triangle(args.k)))
    if args.family in ("wegner", "borodin", "subdivided_complete"):
        fam = gen_family(args.family, args.k)
        emb, s = fam.embedded, fam.sigma
    elif args.family == "bipyramid":
        emb = bipyramid(args.k)
        s = SigmaSystem.empty(emb.graph)
    elif args.family == "wheel":
        emb = wheel(args.k)
        s = SigmaSystem.empty(emb.graph)
    else:
        emb = random_planar_embedding(args.n, rng)
        s = SigmaSystem.empty(emb.graph)
    g = emb.graph
    if args.sigma == "none":
        s = SigmaSystem.empty(g)
    elif args.sigma == "full":
        s = SigmaSystem.neighbourhoods(g)
    elif args.sigma == "random":
        s = random_sigma(g, rng)
    elif args.sigma == "disjoint":
        s = random_disjoint_sigma(g, rng)
    return dumps(embedded_doc(emb, s))


def cmd_check(args) -> str:
    doc = read(args.input)
    out = []
    if doc.is_multigraph:
        h = doc.multigraph()
        out.append(f"multigraph n={len(h.vertices)} m={len(h.edges)} max_degree={h.max_degree()}")
        if doc.col:
            lists = _lists(args, doc, h.edge_ids)
            problems = edge_colouring_problems(h, lists, doc.col)
            if problems:
                raise ValidationFailure("edge colouring invalid: " + problems[0])
            out.append("edge colouring valid")
        return "\n".join(out) + "\n"
    emb, g = _graph(doc)
    s = doc.sigma_system(g)
    out.append(f"graph n={g.n} m={g.m} max_degree={g.max_degree()} beta={s.beta}")
    if emb is not None:
        out.append(f"embedding chi={emb.surface_chi} cellular={int(emb.cellular)} faces={len(emb.faces())} "
                   f"residual={euler_residual(emb)}")
    if doc.col:
        problems = colouring_problems(g, s, doc.col, _lists(args, doc, g.vertices))
        if problems:
            raise ValidationFailure("colouring invalid: " + problems[0])
        out.append(f"colouring valid colours={len(set(doc.col.values()))}")
    if args.witness:
        with open(args.witness, encoding="utf-8") as fh:
            w = StructureWitness.from_text(fh.read())
        rep = validate_witness(g, w, args.zeta)
        if not rep.valid:
            raise ValidationFailure(f"witness {rep}")
        out.append(f"witness {w.kind} {rep}")
    return "\n".join(out) + "\n"


def cmd_clique(args) -> str:
    doc = read(args.input)
    emb, g = _graph(doc)
    if args.cyclic:
        if emb is None:
            raise UsageError("--cyclic needs an embedded graph")
        res = cyclic_clique_number(cyclic_instance(emb))
    elif args.square:
        res = sigma_clique_number(square(g), SigmaSystem.empty(square(g)))
    else:
        res = sigma_clique_number(g, doc.sigma_system(g))
    tag = "" if res.exact else "# lower bound only: node budget exhausted\n"
    return f"{tag}{res.size}\n# witness {' '.join(map(str, res.witness))}\n"


def cmd_colour(args) -> str:
    doc = read(args.input)
    emb, g = _graph(doc)
    s = doc.sigma_system(g)
    if args.mode == "exact":
        lists = _lists(args, doc, g.vertices)
        if lists is None:
            res = exact_sigma_chromatic(g, s)
            if not res.exact:
                raise ValidationFailure(f"chromatic number undecided in budget: {res.lower}..{res.upper}")
            return f"{res.value}\n", dumps(colouring_doc(res.colouring))
        col = exact_list_sigma_colouring(g, s, lists)
        if col is None:
            raise ValidationFailure("no list Sigma-colouring exists")
    else:
        dmax = max((sigma_degree(g, s, v) for v in g.vertices), default=0)
        lists = _lists(args, doc, g.vertices, dmax + 1)
        if args.mode == "greedy":
            res = greedy_sigma_colouring(g, s, lists)
            if not res.success:
                raise ValidationFailure(f"greedy colouring stuck at vertex {res.failed_at}")
            col = res.colouring
        else:
            if emb is None:
                raise UsageError("pipeline mode needs an embedded graph")
            params = PipelineParams(zeta=args.zeta, beta=args.beta, seed=args.seed, delta=args.delta,
                                    kahn=KahnParams(seed=args.seed, workers=_threads()))
            res = pipeline_sigma_colour(emb, s, lists, params)
            if not res.success:
                raise ValidationFailure(f"pipeline failed: {res.failure}")
            col = res.colouring
    problems = colouring_problems(g, s, col, lists)
    if problems:
        raise ValidationFailure("colouring invalid: " + problems[0])
    return f"{len(set(col.values()))}\n", dumps(colouring_doc(col))


def cmd_discharge(args) -> str:
    doc = read(args.input)
    emb = doc.embedded()
    if args.complete:
        emb = complete_to_edge_maximal(emb)
    zeta = _zeta(args, emb)
    if args.action == "ledger":
        led = compute_charges(emb, zeta)
        if led.total_initial() != led.total_final():
            raise ValidationFailure("charge not conserved")
        return led.to_csv()
    return detect_structure(emb, zeta).to_text()


def cmd_reduce(args) -> str:
    doc = read(args.input)
    emb = doc.embedded()
    g = emb.graph
    s = doc.sigma_system(g)
    zeta = _zeta(args, emb)
    w = detect_structure(emb, zeta)
    if w.kind != "S3":
        raise ValidationFailure(f"no S3 structure at zeta={zeta} (found {w.kind})")
    if args.partial is None:
        red = build_reduced_instance(emb, s, w, args.beta if args.beta is not None else s.beta)
        return dumps(embedded_doc(red.embedded0, red.sigma0))
    partial = read(args.partial).col
    lists = _lists(args, doc, g.vertices)
    if lists is None:
        raise UsageError("the matching instance needs lists (list lines, --lists or --colours)")
    mi = build_matching_instance(g, s, w, partial, lists, zeta)
    return dumps(multigraph_doc(mi.h, mi.lists, mi.sigma))


def cmd_polytope(args) -> str:
    doc = read(args.input)
    h = doc.multigraph()
    if args.action == "chi-f":
        return f"{fractional_chromatic_index(h)}\n"
    v = edmonds_membership(h, doc.x, args.scale)
    if v.inside:
        return f"inside ({v.mode})\n"
    c = v.violated
    return f"outside {c.kind} {' '.join(map(str, c.members))} lhs={c.lhs} rhs={c.rhs} ({v.mode})\n"


def cmd_hardcore(args) -> str:
    doc = read(args.input)
    h = doc.multigraph()
    if args.action == "fit":
        lam = activities_from_marginals(h, doc.x, args.delta)
        return dumps(Document(lam=lam))
    m = HardcoreModel(h, doc.lam)
    if args.action == "marginals":
        return dumps(Document(x={e: Fraction(repr(v)) for e, v in m.marginals().items()}))
    counts = {e: 0 for e in h.edge_ids}
    for M in m.sample(substream(args.seed), args.n):
        for e in M:
            counts[e] += 1
    return dumps(Document(x={e: Fraction(c, args.n) for e, c in counts.items()}))


def cmd_kahn(args) -> str:
    doc = read(args.input)
    h = doc.multigraph()
    lists = doc.list_assignment()
    params = KahnParams(K=args.K, s=args.s, T=args.T, retries=args.retries, seed=args.seed,
                        eager_finish=not args.no_eager, workers=_threads())
    res = kahn_run(h, lists, params, args.delta)
    if args.telemetry:
        with open(args.telemetry, "w", encoding="utf-8") as fh:
            fh.write(res.telemetry_csv())
    if not res.success:
        raise ValidationFailure(f"engine failed: {res.reason}")
    problems = edge_colouring_problems(h, lists, res.colouring)
    if problems:
        raise ValidationFailure("edge colouring invalid: " + problems[0])
    return (f"# path {res.path} attempts {res.attempts} s {res.s} T {res.T} K {res.K!r}\n"
            + dumps(colouring_doc(res.colouring)))


def cmd_report(args) -> str:
    doc = read(args.input)
    emb, g = _graph(doc)
    s = doc.sigma_system(g)
    dmax = max((sigma_degree(g, s, v) for v in g.vertices), default=0)
    om = sigma_clique_number(g, s)
    rows = [("vertices", g.n), ("edges", g.m), ("max_degree", g.max_degree()), ("beta", s.beta),
            ("sigma_degree_max", dmax), ("sigma_clique", om.size if om.exact else f">={om.size}"),
            ("sigma_disjoint", int(s.is_disjoint()))]
    if emb is not None:
        zeta = _zeta(args, emb)
        rows += [("faces", len(emb.faces())), ("surface_chi", emb.surface_chi), ("cellular", int(emb.cellular)),
                 ("zeta", zeta), ("structure", detect_structure(complete_to_edge_maximal(emb), zeta).kind)]
    return "".join(f"{k} {v}\n" for k, v in rows)


COMMANDS = {"gen": cmd_gen, "check": cmd_check, "clique": cmd_clique, "colour": cmd_colour,
            "discharge": cmd_discharge, "reduce": cmd_reduce, "polytope": cmd_polytope,
            "hardcore": cmd_hardcore, "kahn": cmd_kahn, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:          # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else 1
    try:
        body = COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"sigmacol: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"sigmacol: error: {exc}", file=sys.stderr)
        return 1
    except (ValidationFailure, FormatError, StructuralError, PreconditionError, ReductionError,
            InvariantError, FitError, ValueError) as exc:
        print(f"sigmacol: validation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    # a (summary, document) pair sends the document to -o and the summary to stdout
    summary, body = body if isinstance(body, tuple) else ("", body)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(header(args) + body)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(header(args) + summary + body)
    return 0


if __name__ == "__main__":
    sys.exit(main())

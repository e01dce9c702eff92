"""Discharging on edge-maximal embedded graphs and detection of the structures S1, S2, S3."""

from __future__ import annotations

import random
from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .graph_core import EmbeddedGraph, SimpleGraph

#: rule id -> (receiver degree, number of big neighbours, amount per big neighbour)
RULES = {
    "R1": (3, 3, 6),
    "R2": (3, 2, 9),
    "R3": (4, 4, 3),
    "R4": (4, 3, 4),
    "R5": (4, 2, 6),
}
R6_AMOUNT = 3

#: largest |X| for which condition (iii) is checked over every subset
EXHAUSTIVE_LIMIT = 20


def zeta_star(chi: int) -> int:
    return 132 * (3 - chi)


def big_vertices(g: SimpleGraph, zeta: int) -> frozenset[int]:
    return frozenset(v for v in g.vertices if g.degree(v) >= zeta + 1)


def e_count(g: SimpleGraph, p: Iterable[int], q: Iterable[int]) -> int:
    """e(P, Q): edges between P and Q, those inside P and Q counted twice."""
    q = set(q)
    return sum(len(g.neighbours(v) & q) for v in set(p))


# -- charges -----------------------------------------------------------------------

class Transfer(tuple):
    __slots__ = ()

    def __new__(cls, src: int, dst: int, amount: int, rule: str):
        return super().__new__(cls, (src, dst, amount, rule))

    src = property(lambda self: self[0])
    dst = property(lambda self: self[1])
    amount = property(lambda self: self[2])
    rule = property(lambda self: self[3])


@dataclass
class ChargeLedger:
    initial: dict[int, int]
    final: dict[int, int]
    transfers: list[Transfer]
    zeta: int

    def total_initial(self) -> int:
        return sum(self.initial.values())

    def total_final(self) -> int:
        return sum(self.final.values())

    def transfers_to(self, v: int) -> list[Transfer]:
        return [t for t in self.transfers if t.dst == v]

    def to_csv(self) -> str:
        count = defaultdict(int)
        for t in self.transfers:
            count[t.src] += 1
            count[t.dst] += 1
        rows = ["vertex,initial,final,transfers"]
        rows += [f"{v},{self.initial[v]},{self.final[v]},{count[v]}" for v in sorted(self.initial)]
        return "\n".join(rows) + "\n"


def rule_for(g: SimpleGraph, v: int, big: frozenset[int]) -> tuple[str, int] | None:
    """Which rule (if any) makes v a receiver, and the amount per big neighbour."""
    d = g.degree(v)
    nb = len(g.neighbours(v) & big)
    if d == 5:
        return ("R6", R6_AMOUNT) if nb else None
    for rule, (deg, nbig, amount) in RULES.items():
        if d == deg and nb == nbig:
            return rule, amount
    return None


def compute_charges(g: EmbeddedGraph | SimpleGraph, zeta: int) -> ChargeLedger:
    sg = g.graph if isinstance(g, EmbeddedGraph) else g
    big = big_vertices(sg, zeta)
    initial = {v: 6 * sg.degree(v) - 36 for v in sg.vertices}
    final = dict(initial)
    transfers: list[Transfer] = []
    # every guard reads the frozen input, so the rules fire simultaneously
    for v in sg.vertices:
        hit = rule_for(sg, v, big)
        if hit is None:
            continue
        rule, amount = hit
        # R1 gives from every neighbour; all three are big there anyway
        for u in sorted(sg.neighbours(v)):
            if u in big:
                transfers.append(Transfer(u, v, amount, rule))
                final[u] -= amount
                final[v] += amount
    return ChargeLedger(initial, final, transfers, zeta)


# -- neighbour classification ---------------------------------------------------

M_CLASSES = ("M1", "M4a", "M4b", "M5", "M6")


def rotation_window(g: EmbeddedGraph, v: int, u: int) -> tuple[int, int, int, int]:
    """(u--, u-, u+, u++) in the rotation at v."""
    rot = g.rotation[v]
    i = rot.index(u)
    k = len(rot)
    return rot[(i - 2) % k], rot[(i - 1) % k], rot[(i + 1) % k], rot[(i + 2) % k]


def classify(g: EmbeddedGraph, zeta: int) -> dict[int, dict[str, frozenset[int]]]:
    """Partition N(v) into M1, M4a, M4b, M5, M6 for every big v.

    Neighbours that fit no class (only possible when S2 is present) are put in M1,
    the class the charge accounting treats most pessimistically.
    """
    sg = g.graph
    big = big_vertices(sg, zeta)
    out = {}
    for v in sorted(big):
        parts: dict[str, set[int]] = {name: set() for name in M_CLASSES}
        for u in g.rotation[v]:
            mm, m, p, pp = rotation_window(g, v, u)
            window = {mm, m, p, pp} - {u}
            du = sg.degree(u)
            if window & big:
                parts["M1"].add(u)
            elif du == 4 and (sg.degree(m) >= 5 or sg.degree(p) >= 5):
                parts["M4a"].add(u)
            elif du == 4 and sg.degree(m) == 4 and sg.degree(p) == 4:
                parts["M4b"].add(u)
            elif du == 5:
                parts["M5"].add(u)
            elif du >= 6:
                parts["M6"].add(u)
            else:
                parts["M1"].add(u)
        out[v] = {name: frozenset(s) for name, s in parts.items()}
    return out


# -- witnesses -----------------------------------------------------------------------

@dataclass(frozen=True)
class StructureWitness:
    kind: str                       # "S1", "S2", "S3" or "none"
    zeta: int
    s2: tuple[int, int | None] | None = None
    X: frozenset[int] = frozenset()
    Y: frozenset[int] = frozenset()
    xy: dict[int, tuple[int, int]] = field(default_factory=dict)
    rounds: int = 0

    def y_of(self, w: Iterable[int]) -> frozenset[int]:
        """Y^W: the y whose two X-neighbours both lie in W."""
        w = set(w)
        return frozenset(y for y in self.Y if set(self.xy[y]) <= w)

    def to_text(self) -> str:
        lines = [f"kind {self.kind}", f"zeta {self.zeta}"]
        if self.kind == "S2" and self.s2 is not None:
            v, b = self.s2
            lines.append(f"s2 {v} {'-' if b is None else b}")
        if self.kind == "S3":
            lines.append("X " + " ".join(map(str, sorted(self.X))))
            lines.append("Y " + " ".join(map(str, sorted(self.Y))))
            for y in sorted(self.Y):
                a, b = self.xy[y]
                lines.append(f"xy {y}: {a} {b}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StructureWitness":
        kind, zeta, s2, X, Y, xy = "none", 0, None, frozenset(), frozenset(), {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            if head == "kind":
                kind = rest.strip()
            elif head == "zeta":
                zeta = int(rest)
            elif head == "s2":
                a, b = rest.split()
                s2 = (int(a), None if b == "-" else int(b))
            elif head == "X":
                X = frozenset(int(t) for t in rest.split())
            elif head == "Y":
                Y = frozenset(int(t) for t in rest.split())
            elif head == "xy":
                y, _, pair = rest.partition(":")
                a, b = pair.split()
                xy[int(y)] = (int(a), int(b))
            else:
                raise ValueError(f"unknown witness line: {raw!r}")
        return cls(kind, zeta, s2, X, Y, xy)


def x_neighbours(g: SimpleGraph, y: int, X: frozenset[int]) -> tuple[int, ...]:
    return tuple(sorted(g.neighbours(y) & X))


def _s3_witness(g: SimpleGraph, X: frozenset[int], Y: frozenset[int], zeta: int, rounds: int) -> StructureWitness:
    xy = {y: x_neighbours(g, y, X) for y in sorted(Y)}
    return StructureWitness("S3", zeta, X=X, Y=Y, xy=xy, rounds=rounds)


# -- condition (iii) -----------------------------------------------------------------

class _Density:
    """f(Z) = e(Z, V\\Y) - e(Z, Y\\Y^Z) - zeta|Z| over subsets Z of X.

    With a_z = |N(z) \\ Y| and m(z, z') the number of y with X^y = {z, z'}, this is
    sum_{z in Z} (a_z - zeta) - m(Z, X\\Z).  A violation of (iii) is f(Z) > 0.
    """

    def __init__(self, g: SimpleGraph, X: Iterable[int], Y: Iterable[int], zeta: int):
        Y = frozenset(Y)
        self.xs = sorted(X)
        self.idx = {x: i for i, x in enumerate(self.xs)}
        n = len(self.xs)
        self.a = np.array([len(g.neighbours(x) - Y) for x in self.xs], dtype=np.int64)
        self.m = np.zeros((n, n), dtype=np.int64)
        Xs = frozenset(self.xs)
        for y in Y:
            pair = [self.idx[x] for x in g.neighbours(y) & Xs]
            if len(pair) == 2:
                i, j = pair
                self.m[i, j] += 1
                self.m[j, i] += 1
        self.zeta = zeta

    def value(self, members: Iterable[int]) -> int:
        ids = [self.idx[x] for x in members]
        inside = np.zeros(len(self.xs), dtype=bool)
        inside[ids] = True
        cut = int(self.m[np.ix_(inside, ~inside)].sum())
        return int((self.a[inside] - self.zeta).sum()) - cut

    def all_values(self) -> np.ndarray:
        """f for every bitmask over xs (bit i <-> xs[i]); O(n 2^n)."""
        n = len(self.xs)
        w = self.a - self.zeta - self.m.sum(axis=1)     # f = sum w + 2 m_in(Z)
        f = np.zeros(1, dtype=np.int64)
        for k in range(n):
            inner = np.zeros(1, dtype=np.int64)          # sum_{j in mask, j<k} m[k, j]
            for j in range(k):
                inner = np.concatenate([inner, inner + self.m[k, j]])
            f = np.concatenate([f, f + w[k] + 2 * inner])
        return f

    def mask_members(self, mask: int) -> frozenset[int]:
        return frozenset(x for i, x in enumerate(self.xs) if (mask >> i) & 1)


def _lex_least(masks: np.ndarray) -> int:
    """Lexicographically least (as sorted tuples) among non-empty masks."""
    cands = [int(m) for m in masks if m]
    prefix = 0
    while True:
        if prefix and prefix in cands:
            return prefix
        rest = [m & ~prefix for m in cands]
        low = min(r & -r for r in rest)
        cands = [m for m, r in zip(cands, rest) if r & -r == low]
        prefix |= low


def find_violation(g: SimpleGraph, X: Iterable[int], Y: Iterable[int], zeta: int,
                   rng: random.Random | None = None) -> tuple[frozenset[int] | None, str]:
    """A set Z violating (iii), or None.  Second value is 'exhaustive' or 'sampled'."""
    dens = _Density(g, X, Y, zeta)
    n = len(dens.xs)
    if n == 0:
        return None, "exhaustive"
    if n <= EXHAUSTIVE_LIMIT:
        f = dens.all_values()
        bad = np.nonzero(f > 0)[0]
        if len(bad) == 0:
            return None, "exhaustive"
        return dens.mask_members(_lex_least(bad)), "exhaustive"
    # greedy growth from every start vertex, then random subsets
    best: frozenset[int] | None = None
    for start in dens.xs:
        z = {start}
        while True:
            if dens.value(z) > 0:
                cand = frozenset(z)
                if best is None or sorted(cand) < sorted(best):
                    best = cand
                break
            outside = [x for x in dens.xs if x not in z]
            if not outside:
                break
            z.add(max(outside, key=lambda x: (dens.value(z | {x}), -x)))
    if best is not None:
        return best, "sampled"
    rng = rng or random.Random(0)
    for _ in range(2000):
        z = frozenset(x for x in dens.xs if rng.random() < 0.5)
        if z and dens.value(z) > 0:
            return z, "sampled"
    return None, "sampled"


def refine(g: SimpleGraph, X: frozenset[int], Y: frozenset[int], zeta: int) -> tuple[frozenset[int], frozenset[int], int]:
    """Remove violating sets Z from X (and Y <- Y^X) until (iii) holds."""
    rounds = 0
    while X and Y:
        z, _ = find_violation(g, X, Y, zeta)
        if z is None:
            break
        prev, X = X, X - z
        Y = frozenset(y for y in Y if g.neighbours(y) & prev <= X)
        rounds += 1
    return X, Y, rounds


def s2_vertex(g: SimpleGraph, zeta: int) -> tuple[int, int | None] | None:
    for v in g.vertices:
        if g.degree(v) > 5:
            continue
        bigs = sorted(u for u in g.neighbours(v) if g.degree(u) > zeta)
        if len(bigs) <= 1:
            return v, (bigs[0] if bigs else None)
    return None


def detect_structure(g: EmbeddedGraph, zeta: int) -> StructureWitness:
    sg = g.graph
    if sg.max_degree() <= zeta:
        return StructureWitness("S1", zeta)
    hit = s2_vertex(sg, zeta)
    if hit is not None:
        return StructureWitness("S2", zeta, s2=hit)
    big = big_vertices(sg, zeta)
    classes = classify(g, zeta)
    y0 = set()
    for v in classes:
        y0 |= classes[v]["M4b"]
    # keep only vertices that satisfy (i) against X0; automatic on edge-maximal inputs
    Y = frozenset(y for y in y0 if len(sg.neighbours(y) & big) == 2
                  and all(sg.degree(u) == 4 for u in sg.neighbours(y) - big))
    X, Y, rounds = refine(sg, big, Y, zeta)
    if not X or not Y:
        return StructureWitness("none", zeta, rounds=rounds)
    return _s3_witness(sg, X, Y, zeta, rounds)


# -- validation ------------------------------------------------------------------------

@dataclass
class ValidationReport:
    valid: bool
    violations: list[tuple[str, str]]
    mode: str = "exhaustive"

    def clauses(self) -> set[str]:
        return {c for c, _ in self.violations}

    def __str__(self) -> str:
        if self.valid:
            return f"valid ({self.mode})"
        return "invalid: " + "; ".join(f"[{c}] {msg}" for c, msg in self.violations)


def validate_witness(g: EmbeddedGraph | SimpleGraph, w: StructureWitness, zeta: int | None = None) -> ValidationReport:
    sg = g.graph if isinstance(g, EmbeddedGraph) else g
    zeta = w.zeta if zeta is None else zeta
    bad: list[tuple[str, str]] = []
    if w.kind == "S1":
        over = [v for v in sg.vertices if sg.degree(v) > zeta]
        if over:
            bad.append(("S1", f"degree above {zeta} at {over[:5]}"))
        return ValidationReport(not bad, bad)
    if w.kind == "S2":
        if w.s2 is None or w.s2[0] not in sg:
            return ValidationReport(False, [("S2", "missing vertex")])
        v, b = w.s2
        if sg.degree(v) > 5:
            bad.append(("S2", f"d({v}) = {sg.degree(v)} > 5"))
        bigs = sorted(u for u in sg.neighbours(v) if sg.degree(u) > zeta)
        if len(bigs) > 1:
            bad.append(("S2", f"{v} has {len(bigs)} neighbours of degree > {zeta}"))
        elif bigs != ([] if b is None else [b]):
            bad.append(("S2", f"recorded big neighbour {b} differs from {bigs}"))
        return ValidationReport(not bad, bad)
    if w.kind != "S3":
        return ValidationReport(False, [("kind", f"no structure ({w.kind})")])

    X, Y = w.X, w.Y
    if not X or not Y:
        bad.append(("S3", "X and Y must be non-empty"))
    if X & Y:
        bad.append(("S3", f"X and Y intersect in {sorted(X & Y)}"))
    if not (X | Y) <= set(sg.vertices):
        bad.append(("S3", "unknown vertices"))
        return ValidationReport(False, bad)
    # (i)
    for x in sorted(X):
        if sg.degree(x) < zeta + 1:
            bad.append(("i", f"d({x}) = {sg.degree(x)} < {zeta + 1}"))
    for y in sorted(Y):
        if sg.degree(y) != 4:
            bad.append(("i", f"d({y}) = {sg.degree(y)} != 4"))
        xn = sg.neighbours(y) & X
        if len(xn) != 2:
            bad.append(("i", f"{y} has {len(xn)} neighbours in X"))
        for u in sorted(sg.neighbours(y) - X):
            if sg.degree(u) != 4:
                bad.append(("i", f"neighbour {u} of {y} has degree {sg.degree(u)}"))
        if w.xy.get(y) is not None and set(w.xy[y]) != xn:
            bad.append(("i", f"recorded X^{y} = {w.xy[y]} but actual {sorted(xn)}"))
    # (ii)
    ys = sorted(Y)
    xset = {y: sg.neighbours(y) & X for y in ys}
    for i, y in enumerate(ys):
        for z in ys[i + 1:]:
            linked = sg.has_edge(y, z) or bool((sg.neighbours(y) & sg.neighbours(z)) - X)
            if linked and xset[y] != xset[z]:
                bad.append(("ii", f"{y} and {z} are linked but X^y != X^z"))
    # (iii)
    mode = "exhaustive"
    if not any(c == "i" for c, _ in bad):
        z, mode = find_violation(sg, X, Y, zeta)
        if z is not None:
            bad.append(("iii", f"W = {sorted(z)} violates the density inequality"))
    return ValidationReport(not bad, bad, mode)


def density_slack(g: SimpleGraph, X: Iterable[int], Y: Iterable[int], W: Iterable[int], zeta: int) -> int:
    """Right side minus left side of (iii) for one W, straight from the definition."""
    X, Y, W = frozenset(X), frozenset(Y), frozenset(W)
    V = frozenset(g.vertices)
    yw = frozenset(y for y in Y if (g.neighbours(y) & X) <= W)
    return e_count(g, W, Y - yw) + zeta * len(W) - e_count(g, W, V - Y)

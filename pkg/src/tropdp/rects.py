"""Rectangle analysis of circuits and polynomials.

Covers the balanced rectangle decomposition of a circuit, the below/above
polynomials of a gate, set-rectangles and thinness for the independent-set
family G_k, layer colouring of polynomial rectangles and the tiny-scale
rectangle-size bound for G_{n,k}.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .circuit import EXT, SUM, Circuit, extract_gate_sets
from .circuit import DEFAULT_CAP
from .errors import WorkbenchError
from .graphs import (
    GraphInstance,
    all_assignments,
    canonical_solution,
    cv,
    gen_dtsp_graph,
    gen_is_graph,
    layer_edge_sets,
)
from .poly import Monomial, Polynomial


def _mono(vs: Iterable[str]) -> Monomial:
    return Monomial.from_exponents({v: 1 for v in vs})


@dataclass(frozen=True)
class PolyRectangle:
    g: Polynomial
    h: Polynomial
    gate: int | None = None

    def product(self) -> Polynomial:
        return self.g * self.h

    def size(self) -> int:
        """Number of distinct expanded monomials of g·h."""
        return len(self.product())

    def x_counts(self, X: Iterable[str]) -> tuple[int, int]:
        X = set(X)
        return len(self.g.support & X), len(self.h.support & X)

    def is_balanced(self, X: Iterable[str]) -> bool:
        X = set(X)
        a, b = self.x_counts(X)
        return 3 * max(a, b) <= 2 * len(X)

    def to_dict(self, X: Iterable[str] | None = None) -> dict:
        d = {"gate": self.gate, "g_size": len(self.g), "h_size": len(self.h), "product_size": self.size()}
        if X is not None:
            X = set(X)
            a, b = self.x_counts(X)
            d.update({"g_x": a, "h_x": b, "limit": 2 * len(X) / 3, "balanced": self.is_balanced(X)})
        return d


def _check_homogeneous(f: Polynomial):
    if not f.is_homogeneous():
        raise WorkbenchError("NOT_HOMOGENEOUS", "balanced decomposition needs a homogeneous polynomial")


def decompose_balanced(c: Circuit, X: Iterable[str], cap: int = DEFAULT_CAP) -> list[PolyRectangle]:
    """Split the extraction of ``c`` into ≤ size(c) rectangles balanced w.r.t. ``X``.

    Every monomial walks its parse tree from the output.  At a sum gate the walk
    moves into the child whose below-support meets X in more variables (ties:
    earlier in topological order); at an extremum gate it follows the child
    that produces the current sub-monomial.  It stops at the first gate whose
    below-support meets X in at most 2/3 of X while the accumulated context
    does too, and the monomial lands in that gate's rectangle: the gate-side
    factor goes to g, the context to h.
    """
    sets = extract_gate_sets(c, cap=cap)
    f = Polynomial(sets[c.output])
    _check_homogeneous(f)
    if not f.is_multilinear():
        raise WorkbenchError("NOT_MULTILINEAR")
    X = frozenset(X)
    if not X <= f.support:
        raise WorkbenchError("X_NOT_IN_SUPPORT", ", ".join(sorted(X - f.support)))
    order = {w: i for i, w in enumerate(c.cone_order(c.output))}
    fs = {w: {frozenset(m) for m in s} for w, s in sets.items()}
    xsup = {w: len(frozenset().union(*s) & X) for w, s in fs.items()}
    limit = 2 * len(X) / 3
    ops, L, R = c.ops, c.left, c.right
    parts: dict[int, tuple[set, set]] = {}
    for m in sorted(sets[c.output]):
        w, mw, ctx = c.output, frozenset(m), frozenset()
        while not (xsup[w] <= limit and len(ctx & X) <= limit):
            op = ops[w]
            if op == EXT:
                w = min((ch for ch in (L[w], R[w]) if mw in fs[ch]), key=order.__getitem__)
            elif op == SUM:
                a, b = L[w], R[w]
                Bb = fs[b]
                ma = min((tuple(sorted(x)) for x in fs[a] if x <= mw and (mw - x) in Bb))
                ma = frozenset(ma)
                mb = mw - ma
                if (xsup[a], -order[a]) > (xsup[b], -order[b]):
                    w, mw, ctx = a, ma, ctx | mb
                else:
                    w, mw, ctx = b, mb, ctx | ma
            else:
                raise WorkbenchError("DECOMPOSITION_STUCK", f"no balanced gate on the walk of {_mono(m)}")
        gs, hs = parts.setdefault(w, (set(), set()))
        gs.add(_mono(mw))
        hs.add(_mono(ctx))
    out = []
    for w in sorted(parts, key=order.__getitem__):
        gs, hs = parts[w]
        out.append(PolyRectangle(Polynomial(gs), Polynomial(hs), w))
    return out


@dataclass
class DecompositionCheck:
    rectangles: int
    gates: int
    all_balanced: bool
    all_inside: bool
    union_equal: bool
    details: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.rectangles <= self.gates and self.all_balanced and self.all_inside and self.union_equal

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "rectangles": self.rectangles,
            "gates": self.gates,
            "all_balanced": self.all_balanced,
            "all_inside": self.all_inside,
            "union_equal": self.union_equal,
            "details": self.details,
        }


def check_decomposition(c: Circuit, X: Iterable[str], rects: Sequence[PolyRectangle], f: Polynomial | None = None) -> DecompositionCheck:
    """Recheck the four decomposition guarantees by expansion."""
    X = set(X)
    f = f if f is not None else Polynomial(extract_gate_sets(c)[c.output])
    union: set = set()
    inside = True
    for r in rects:
        p = r.product().monomials
        inside &= p <= f.monomials
        union |= p
    return DecompositionCheck(
        len(rects),
        c.size(),
        all(r.is_balanced(X) for r in rects),
        inside,
        union == set(f.monomials),
        [r.to_dict(X) for r in rects],
    )


# below / above ---------------------------------------------------------------------


def below(c: Circuit, w: int, cap: int = DEFAULT_CAP) -> Polynomial:
    """B_w: the polynomial produced at gate ``w``."""
    return Polynomial(extract_gate_sets(c, root=w, cap=cap)[w])


def above(c: Circuit, w: int, f: Polynomial, cap: int = DEFAULT_CAP) -> Polynomial:
    """A_w: all multilinear m over sup(f) with m·B_w ⊆ f.

    Every such m is a quotient of some monomial of f by some monomial of B_w,
    so the candidates are exactly those quotients.
    """
    if not f.is_multilinear():
        raise WorkbenchError("NOT_MULTILINEAR")
    bw = [frozenset(m.support) for m in below(c, w, cap).monomials]
    return above_of(bw, f)


def above_of(bw: Sequence[frozenset], f: Polynomial) -> Polynomial:
    fset = {frozenset(m.support) for m in f.monomials}
    cands = {fm - b for fm in fset for b in bw if b <= fm}
    keep = [m for m in cands if all(not (m & b) and (m | b) in fset for b in bw)]
    return Polynomial(_mono(m) for m in keep)


# set rectangles and thinness on G_k -------------------------------------------------


@dataclass(frozen=True)
class SetRectangle:
    side_a: frozenset[frozenset[str]]
    side_b: frozenset[frozenset[str]]

    @classmethod
    def of(cls, side_a: Iterable[Iterable[str]], side_b: Iterable[Iterable[str]]) -> "SetRectangle":
        return cls(frozenset(frozenset(a) for a in side_a), frozenset(frozenset(b) for b in side_b))


class _GkIndex:
    """Bitmask view of G_k: adjacency masks and the canonical solutions."""

    _cache: dict[int, "_GkIndex"] = {}

    def __init__(self, k: int):
        g, d = gen_is_graph(k)
        self.k = k
        self.g = g
        self.d = d
        self.bit = {v: 1 << i for i, v in enumerate(g.vertices)}
        self.adj = [0] * len(g.vertices)
        for u, v in g.edges:
            self.adj[g.index(u)] |= self.bit[v]
            self.adj[g.index(v)] |= self.bit[u]
        self.canon = [self.mask(canonical_solution(k, a)) for a in all_assignments(k)]
        self.canon_set = frozenset(self.canon)
        seen: list[str] = []
        for bag in d.bags:
            for v in bag:
                if v not in seen:
                    seen.append(v)
        self.intro_order = seen

    @classmethod
    def get(cls, k: int) -> "_GkIndex":
        if k not in cls._cache:
            cls._cache[k] = cls(k)
        return cls._cache[k]

    def mask(self, vs: Iterable[str]) -> int:
        try:
            return sum(self.bit[v] for v in set(vs))
        except KeyError as e:
            raise WorkbenchError("UNKNOWN_VERTEX", str(e)) from None

    def nbr(self, m: int) -> int:
        out = 0
        while m:
            low = m & -m
            out |= self.adj[low.bit_length() - 1]
            m ^= low
        return out

    def independent(self, m: int) -> bool:
        return not (self.nbr(m) & m)

    def compatible(self, a: int, b: int) -> bool:
        return not (a & b) and not (self.nbr(a) & b)

    def names(self, m: int) -> frozenset[str]:
        return frozenset(v for v, b in self.bit.items() if m & b)


def _masks_rectangle(ix: _GkIndex, A: Sequence[int], B: Sequence[int]) -> bool:
    if not all(ix.independent(x) for x in list(A) + list(B)):
        return False
    return all(ix.compatible(a, b) for a in A for b in B)


def _useful_masks(ix: _GkIndex, A: Sequence[int], B: Sequence[int]) -> tuple[list[int], list[int]]:
    ua = [a for a in A if any((a | b) in ix.canon_set for b in B)]
    ub = [b for b in B if any((a | b) in ix.canon_set for a in A)]
    return ua, ub


def useful_sets(r: SetRectangle, k: int) -> tuple[frozenset, frozenset]:
    """Members of each side that the other side completes to a canonical solution."""
    ix = _GkIndex.get(k)
    A = [ix.mask(a) for a in r.side_a]
    B = [ix.mask(b) for b in r.side_b]
    if not _masks_rectangle(ix, A, B):
        raise WorkbenchError("NOT_A_RECTANGLE")
    ua, ub = _useful_masks(ix, A, B)
    return frozenset(ix.names(a) for a in ua), frozenset(ix.names(b) for b in ub)


def check_thin(r: SetRectangle, k: int) -> bool:
    ua, ub = useful_sets(r, k)
    if not ua:
        raise WorkbenchError("PRECONDITION_UNMET", "rectangle contains no canonical solution")
    return min(len(ua), len(ub)) <= 1


def _thin_masks(ix: _GkIndex, A, B) -> bool | None:
    """None when the rectangle holds no canonical solution."""
    ua, ub = _useful_masks(ix, A, B)
    if not ua:
        return None
    return min(len(ua), len(ub)) <= 1


@dataclass
class ThinReport:
    checked: int
    violations: int
    skipped: int
    examples: list[dict] = field(default_factory=list)
    both_sides_multi: int = 0

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "violations": self.violations,
            "skipped": self.skipped,
            "both_sides_multi": self.both_sides_multi,
            "examples": self.examples,
        }


def cut_masks(ix: _GkIndex, pos: int) -> tuple[int, int]:
    prefix = ix.mask(ix.intro_order[:pos])
    full = (1 << len(ix.g.vertices)) - 1
    return prefix, full & ~prefix


def exhaustive_thin_check(k: int = 2, max_side: int = 2) -> ThinReport:
    """All rectangles whose sides are ≤ max_side restrictions of canonical solutions to a prefix/suffix cut."""
    ix = _GkIndex.get(k)
    checked = skipped = bad = multi = 0
    examples = []
    for pos in range(len(ix.intro_order) + 1):
        pre, suf = cut_masks(ix, pos)
        pa = sorted({c & pre for c in ix.canon})
        sb = sorted({c & suf for c in ix.canon})
        sides_a = [s for t in range(1, max_side + 1) for s in combinations(pa, t)]
        sides_b = [s for t in range(1, max_side + 1) for s in combinations(sb, t)]
        for A in sides_a:
            for B in sides_b:
                if not _masks_rectangle(ix, A, B):
                    skipped += 1
                    continue
                res = _thin_masks(ix, A, B)
                if res is None:
                    skipped += 1
                    continue
                checked += 1
                multi += len(A) > 1 and len(B) > 1
                if not res:
                    bad += 1
                    if len(examples) < 5:
                        examples.append({"cut": pos, "A": [sorted(ix.names(a)) for a in A], "B": [sorted(ix.names(b)) for b in B]})
    return ThinReport(checked, bad, skipped, examples, multi)


def _mutate(ix: _GkIndex, base: int, region: int, rng: random.Random, rate: float) -> int:
    """Flip each region vertex with probability ``rate``, then drop vertices until independent."""
    m = base & region
    b = region
    while b:
        low = b & -b
        if rng.random() < rate:
            m ^= low
        b ^= low
    while not ix.independent(m):
        # repair: remove the highest conflicting vertex
        conflict = m & ix.nbr(m)
        m ^= 1 << (conflict.bit_length() - 1)
    return m


def sample_thin_check(k: int, samples: int, seed: int, max_extra: int = 2, rate: float = 0.1) -> ThinReport:
    """Seeded rectangles around a canonical solution split at a random cut.

    Each side starts from the two restrictions of one canonical solution and
    receives up to ``max_extra`` mutated restrictions of random canonical
    solutions; a candidate joins a side only if it keeps the pair a rectangle.
    """
    ix = _GkIndex.get(k)
    rng = random.Random(seed)
    nv = len(ix.intro_order)
    bad = multi = 0
    examples = []
    cuts = [cut_masks(ix, p) for p in range(nv + 1)]
    for _ in range(samples):
        pos = rng.randrange(nv + 1)
        pre, suf = cuts[pos]
        c0 = rng.choice(ix.canon)
        A, B = [c0 & pre], [c0 & suf]
        for _ in range(rng.randint(0, max_extra)):
            cand = _mutate(ix, rng.choice(ix.canon), pre, rng, rate)
            if cand not in A and all(ix.compatible(cand, b) for b in B):
                A.append(cand)
        for _ in range(rng.randint(0, max_extra)):
            cand = _mutate(ix, rng.choice(ix.canon), suf, rng, rate)
            if cand not in B and all(ix.compatible(a, cand) for a in A):
                B.append(cand)
        multi += len(A) > 1 and len(B) > 1
        if not _thin_masks(ix, A, B):
            bad += 1
            if len(examples) < 5:
                examples.append({"cut": pos, "A": [sorted(ix.names(a)) for a in A], "B": [sorted(ix.names(b)) for b in B]})
    return ThinReport(samples, bad, 0, examples, multi)


# layer colouring -----------------------------------------------------------------


def monochromatic_layers(r: PolyRectangle, layers: Sequence[Iterable[str]]) -> list[dict]:
    """Per layer: MONO_G, MONO_H, MIXED or UNTOUCHED, with the variables missing from both supports."""
    sg, sh = r.g.support, r.h.support
    out = []
    for i, layer in enumerate(layers):
        lay = set(layer)
        in_g, in_h = bool(lay & sg), bool(lay & sh)
        status = "MIXED" if in_g and in_h else "MONO_G" if in_g else "MONO_H" if in_h else "UNTOUCHED"
        out.append({"layer": i, "status": status, "absent": sorted(lay - sg - sh)})
    return out


def dst_layer_vars(g: GraphInstance) -> list[list[str]]:
    return [[g.edge_var(u, v) for u, v in es] for es in layer_edge_sets(g)]


def check_dst_colorful(r: PolyRectangle, g: GraphInstance) -> dict:
    """Every MIXED between-column layer E_1..E_{n−1} must leave some arc variable unused."""
    rows = monochromatic_layers(r, dst_layer_vars(g))
    n = g.params["n"]
    inner = [row for row in rows if 1 <= row["layer"] <= n - 1]
    mixed = [row for row in inner if row["status"] == "MIXED"]
    return {
        "mixed_layers": [row["layer"] for row in mixed],
        "holds": all(row["absent"] for row in mixed),
        "layers": rows,
    }


# rectangle-size bound on G_{n,k} -----------------------------------------------------


def dtsp_xbar(n: int, k: int) -> list[str]:
    g, _ = gen_dtsp_graph(n, k)
    return [g.edge_var(cv(i, 1), cv(i % n + 1, 1)) for i in range(1, n + 1)]


def dtsp_rect_bound(n: int, k: int, ck: int) -> float:
    if k < 2:
        raise WorkbenchError("INVALID_PARAMS", "the bound carries a ln k factor and needs k >= 2")
    return math.factorial(k - 1) * math.factorial(k) ** (n - 1) / ck * (2 * k * math.log(k))


def _is_dtsp_cycle(g: GraphInstance, arcs: Sequence[str], lookup: dict[str, tuple[str, str]]) -> bool:
    succ = {}
    for a in arcs:
        u, v = lookup[a]
        if u in succ:
            return False
        succ[u] = v
    if len(succ) != g.n_vertices:
        return False
    start = g.vertices[0]
    x, steps = succ.get(start), 1
    while x is not None and x != start and steps <= g.n_vertices:
        x = succ.get(x)
        steps += 1
    return x == start and steps == g.n_vertices


def check_rectangle_bound_dtsp(r: PolyRectangle, n: int, k: int, ck: int) -> dict:
    """Check |g·h| against (k−1)!(k!)^{n−1}·C_k⁻¹·2k ln k for a balanced rectangle of G_{n,k}."""
    g, _ = gen_dtsp_graph(n, k)
    xbar = set(dtsp_xbar(n, k))
    if not r.is_balanced(xbar):
        a, b = r.x_counts(xbar)
        raise WorkbenchError("NOT_BALANCED", f"|sup(g)∩X|={a}, |sup(h)∩X|={b}, limit {2 * len(xbar) / 3:.3f}")
    lookup = {g.edge_var(u, v): (u, v) for u, v in g.edges}
    prod = r.product()
    for m in prod.monomials:
        if not m.is_multilinear() or any(x not in lookup for x in m.support) or not _is_dtsp_cycle(g, sorted(m.support), lookup):
            raise WorkbenchError("NOT_A_RECTANGLE", f"{m} is not a Hamiltonian cycle")
    size = len(prod)
    bound = dtsp_rect_bound(n, k, ck)
    mixed = _mixed_matching_counts(r, g, lookup)
    return {
        "n": n,
        "k": k,
        "ck": ck,
        "product_size": size,
        "bound": bound,
        "slack": bound - size,
        "holds": size <= bound + 1e-9,
        "mixed_layers": mixed,
        "mixed_ok": all(row["matchings"] <= row["limit"] <= math.factorial(k - 1) for row in mixed),
    }


def _mixed_matching_counts(r: PolyRectangle, g: GraphInstance, lookup) -> list[dict]:
    """For each MIXED layer, distinct induced matchings vs |V^g_head|!·|V^h_head|!."""
    layers = dst_layer_vars(g)
    rows = []
    sg, sh = r.g.support, r.h.support
    prod = r.product()
    for row in monochromatic_layers(r, layers):
        if row["status"] != "MIXED":
            continue
        lay = set(layers[row["layer"]])
        heads_g = {lookup[x][1] for x in lay & sg}
        heads_h = {lookup[x][1] for x in lay & sh}
        matchings = {frozenset(m.support) & lay for m in prod.monomials}
        rows.append(
            {
                "layer": row["layer"],
                "matchings": len(matchings),
                "limit": math.factorial(len(heads_g)) * math.factorial(len(heads_h)),
            }
        )
    return rows


def rectangle_report_rows(rects: Sequence[PolyRectangle], X: Iterable[str]) -> list[dict]:
    X = set(X)
    return [dict(index=i, **r.to_dict(X)) for i, r in enumerate(rects)]


def split_canonical(k: int, assignment: Sequence[int], pos: int) -> SetRectangle:
    """Prefix/suffix split of one canonical solution at an introduction-order cut."""
    ix = _GkIndex.get(k)
    c = ix.mask(canonical_solution(k, assignment))
    pre, suf = cut_masks(ix, pos)
    return SetRectangle.of([ix.names(c & pre)], [ix.names(c & suf)])

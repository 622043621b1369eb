"""Matching compatibility matrices, rectangles and rectangle covers.

Rows of a matrix are stored as Python-int bitmasks over column indices, which
keeps biclique enumeration and cover bookkeeping cheap at the sizes we care
about (at most a few hundred rows).
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import ScaleExceeded, WorkbenchError
from .perm import (
    ALL_TWO_CYCLES,
    SINGLE_CYCLE,
    TWO_K_CYCLES,
    Permutation,
    all_permutations,
    compose,
    cycle_type,
    enumerate_class,
    inverse,
    is_single_cycle,
)


class Variant(enum.Enum):
    BIPARTITE = "bipartite"
    CLIQUE = "clique"

    @classmethod
    def parse(cls, s: "str | Variant") -> "Variant":
        if isinstance(s, Variant):
            return s
        try:
            return cls(s.lower())
        except ValueError:
            raise WorkbenchError("INVALID_VARIANT", repr(s)) from None


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class Rectangle:
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    @classmethod
    def of(cls, rows: Iterable[int], cols: Iterable[int]) -> "Rectangle":
        return cls(tuple(sorted(set(rows))), tuple(sorted(set(cols))))

    @property
    def size(self) -> int:
        return len(self.rows) * len(self.cols)

    def cells(self):
        for r in self.rows:
            for c in self.cols:
                yield r, c

    def to_dict(self) -> dict:
        return {"rows": list(self.rows), "cols": list(self.cols)}


@dataclass
class RectangleCover:
    rectangles: list[Rectangle]
    optimal: bool = False
    complete: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.rectangles)

    def to_dict(self) -> dict:
        d = {
            "size": self.size,
            "optimal": self.optimal,
            "complete": self.complete,
            "rectangles": [r.to_dict() for r in self.rectangles],
        }
        d.update(self.meta)
        return d


class CompatMatrix:
    """0-1 matrix indexed by permutations, with row bitmasks."""

    def __init__(self, variant: Variant, k: int, indices: list[Permutation], rows: list[int]):
        self.variant = variant
        self.k = k
        self.indices = indices
        self.rows = rows
        self.index_of = {tuple(p): i for i, p in enumerate(indices)}
        self._cols: list[int] | None = None

    @property
    def dim(self) -> int:
        return len(self.indices)

    @property
    def cols(self) -> list[int]:
        if self._cols is None:
            cols = [0] * self.dim
            for i, mask in enumerate(self.rows):
                for j in _bits(mask):
                    cols[j] |= 1 << i
            self._cols = cols
        return self._cols

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def ones(self) -> int:
        return sum(bin(m).count("1") for m in self.rows)

    def one_cells(self) -> list[tuple[int, int]]:
        return [(i, j) for i, m in enumerate(self.rows) for j in _bits(m)]

    def to_lists(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.dim)] for i in range(self.dim)]

    def is_one_product(self, rho1: Sequence[int], rho2: Sequence[int]) -> bool:
        prod = compose(rho2, rho1)
        if self.variant is Variant.BIPARTITE:
            return is_single_cycle(prod)
        return cycle_type(prod) == (self.k, self.k)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "k": self.k,
            "indices": [p.images() for p in self.indices],
            "entries": ["".join(str(self.entry(i, j)) for j in range(self.dim)) for i in range(self.dim)],
        }


MAX_K = {Variant.BIPARTITE: 5, Variant.CLIQUE: 5}


def build_matrix(k: int, variant: Variant | str) -> CompatMatrix:
    variant = Variant.parse(variant)
    if k < 1:
        raise WorkbenchError("INVALID_K", f"k={k}")
    if k > MAX_K[variant]:
        raise ScaleExceeded("SCALE_EXCEEDED", f"{variant.value}({k}) is beyond k={MAX_K[variant]}")
    if variant is Variant.BIPARTITE:
        idx = sorted(all_permutations(k))
        good = {tuple(p) for p in enumerate_class(k, SINGLE_CYCLE)}
    else:
        idx = enumerate_class(2 * k, ALL_TWO_CYCLES)
        good = {tuple(p) for p in enumerate_class(2 * k, TWO_K_CYCLES)}
    rows = []
    for r1 in idx:
        mask = 0
        for j, r2 in enumerate(idx):
            if tuple(r2[x] for x in r1) in good:
                mask |= 1 << j
        rows.append(mask)
    return CompatMatrix(variant, k, idx, rows)


def is_rectangle(m: CompatMatrix, r: Rectangle) -> bool:
    for x in (*r.rows, *r.cols):
        if not 0 <= x < m.dim:
            raise WorkbenchError("INDEX_OUT_OF_RANGE", str(x))
    need = 0
    for c in r.cols:
        need |= 1 << c
    return all(m.rows[i] & need == need for i in r.rows)


def verify_cover(m: CompatMatrix, cover: RectangleCover | Sequence[Rectangle]) -> tuple[bool, list[str]]:
    """Independent validity check: every rectangle all-ones, every 1-entry covered."""
    rects = cover.rectangles if isinstance(cover, RectangleCover) else list(cover)
    problems = []
    covered = [0] * m.dim
    for t, r in enumerate(rects):
        for i, j in r.cells():
            if not (0 <= i < m.dim and 0 <= j < m.dim) or not m.entry(i, j):
                problems.append(f"rectangle {t} crosses a 0-entry at ({i},{j})")
                break
            covered[i] |= 1 << j
    for i in range(m.dim):
        missing = m.rows[i] & ~covered[i]
        if missing:
            problems.append(f"row {i}: {len(_bits(missing))} uncovered 1-entries")
    return not problems, problems


def maximal_rectangles(m: CompatMatrix, limit: int = 200_000) -> list[Rectangle]:
    """All maximal all-ones rectangles with nonempty sides.

    Column sides of maximal rectangles are exactly the nonempty intersections
    of row neighbourhoods, so we close the row masks under intersection.
    """
    if m.dim > 945:
        raise ScaleExceeded("SCALE_EXCEEDED", f"dimension {m.dim}")
    seen: set[int] = set()
    frontier = []
    for mask in m.rows:
        if mask and mask not in seen:
            seen.add(mask)
            frontier.append(mask)
    while frontier:
        nxt = []
        for a in frontier:
            for b in m.rows:
                c = a & b
                if c and c not in seen:
                    seen.add(c)
                    nxt.append(c)
                    if len(seen) > limit:
                        raise ScaleExceeded("SCALE_EXCEEDED", f"more than {limit} maximal rectangles")
        frontier = nxt
    out = []
    for cols in seen:
        rows = [i for i, mask in enumerate(m.rows) if mask & cols == cols]
        out.append(Rectangle(tuple(rows), tuple(_bits(cols))))
    out.sort(key=lambda r: (-r.size, r.rows, r.cols))
    return out


def max_rectangle(m: CompatMatrix) -> Rectangle:
    """Largest rectangle; ties go to the lexicographically least row set."""
    if m.dim > 120:
        raise ScaleExceeded("SCALE_EXCEEDED", f"exact search limited to dimension 120, got {m.dim}")
    rects = maximal_rectangles(m)
    if not rects:
        return Rectangle((), ())
    best = rects[0].size
    return min((r for r in rects if r.size == best), key=lambda r: (r.rows, r.cols))


def _cover_problem(m: CompatMatrix, rects: list[Rectangle]):
    cells = m.one_cells()
    cell_id = {c: t for t, c in enumerate(cells)}
    masks = []
    for r in rects:
        mask = 0
        for c in r.cells():
            mask |= 1 << cell_id[c]
        masks.append(mask)
    return cells, masks


def min_cover(m: CompatMatrix, budget: float = 60.0) -> RectangleCover:
    """Exact minimum rectangle cover by branch and bound over maximal rectangles.

    Branching always picks the uncovered cell with the fewest covering
    rectangles and tries those rectangles in index order, so the result is
    deterministic.  ``optimal`` is False when the time budget ran out first.
    """
    if m.dim > 120:
        raise ScaleExceeded("SCALE_EXCEEDED", f"exact search limited to dimension 120, got {m.dim}")
    rects = maximal_rectangles(m)
    cells, masks = _cover_problem(m, rects)
    ncell = len(cells)
    if ncell == 0:
        return RectangleCover([], optimal=True)
    full = (1 << ncell) - 1
    covering: list[list[int]] = [[] for _ in range(ncell)]
    for t, mask in enumerate(masks):
        for c in _bits(mask):
            covering[c].append(t)
    start_ub = greedy_cover(m)
    max_cells = max(bin(x).count("1") for x in masks)
    best_size = [start_ub.size + 1]
    best_sol: list[list[int] | None] = [None]
    deadline = time.monotonic() + budget
    timed_out = [False]
    nodes = [0]

    def lower_bound(uncovered: int) -> int:
        # Greedy fooling set: uncovered cells pairwise never in a common rectangle.
        lb = 0
        blocked = 0
        rem = uncovered
        while rem:
            low = rem & -rem
            c = low.bit_length() - 1
            rem ^= low
            if blocked >> c & 1:
                continue
            lb += 1
            for t in covering[c]:
                blocked |= masks[t]
        area = -(-bin(uncovered).count("1") // max_cells)
        return max(lb, area)

    def search(uncovered: int, chosen: list[int]):
        nodes[0] += 1
        if not uncovered:
            if len(chosen) < best_size[0]:
                best_size[0] = len(chosen)
                best_sol[0] = list(chosen)
            return
        if nodes[0] & 1023 == 0 and time.monotonic() > deadline:
            timed_out[0] = True
        if timed_out[0]:
            return
        if len(chosen) + lower_bound(uncovered) >= best_size[0]:
            return
        pick, pick_opts = -1, None
        rem = uncovered
        while rem:
            low = rem & -rem
            c = low.bit_length() - 1
            rem ^= low
            opts = covering[c]
            if pick_opts is None or len(opts) < len(pick_opts):
                pick, pick_opts = c, opts
                if len(opts) == 1:
                    break
        for t in sorted(pick_opts, key=lambda t: -bin(masks[t] & uncovered).count("1")):
            chosen.append(t)
            search(uncovered & ~masks[t], chosen)
            chosen.pop()

    search(full, [])
    if best_sol[0] is None:
        return RectangleCover(start_ub.rectangles, optimal=not timed_out[0], meta={"nodes": nodes[0]})
    chosen = sorted(best_sol[0], key=lambda t: (rects[t].rows, rects[t].cols))
    return RectangleCover([rects[t] for t in chosen], optimal=not timed_out[0], meta={"nodes": nodes[0]})


def greedy_cover(m: CompatMatrix) -> RectangleCover:
    """Grow rectangles one at a time, each time covering as many uncovered ones as possible."""
    if m.dim > 1000:
        raise ScaleExceeded("SCALE_EXCEEDED", f"dimension {m.dim}")
    n = m.dim
    uncovered = list(m.rows)
    out: list[Rectangle] = []
    popcount = int.bit_count if hasattr(int, "bit_count") else (lambda x: bin(x).count("1"))
    while any(uncovered):
        seed = max(range(n), key=lambda i: (popcount(uncovered[i]), -i))
        rows = [seed]
        cols = m.rows[seed]
        gain = popcount(uncovered[seed] & cols)
        while True:
            best_i, best_gain = -1, gain
            for i in range(n):
                if i in rows:
                    continue
                nc = cols & m.rows[i]
                if not nc:
                    continue
                g = sum(popcount(uncovered[r] & nc) for r in rows) + popcount(uncovered[i] & nc)
                if g > best_gain:
                    best_i, best_gain = i, g
            if best_i < 0:
                break
            rows.append(best_i)
            cols &= m.rows[best_i]
            gain = best_gain
        rows = [i for i in range(n) if m.rows[i] & cols == cols]
        for i in rows:
            uncovered[i] &= ~cols
        out.append(Rectangle(tuple(rows), tuple(_bits(cols))))
    return RectangleCover(out, optimal=False)


# randomized conjugation cover ------------------------------------------------


def cover_length(k: int, rect_size: int) -> int:
    """ℓ = max(1, ⌈k!(k−1)!/|R| · 2k ln k⌉)."""
    if rect_size < 1:
        raise WorkbenchError("NOT_A_RECTANGLE", "empty rectangle")
    val = math.factorial(k) * math.factorial(k - 1) / rect_size * 2 * k * math.log(k)
    return max(1, math.ceil(val))


def mu(alpha: Sequence[int], beta: Sequence[int], rho1: Sequence[int], rho2: Sequence[int]):
    """μ_{α,β}(ρ1, ρ2) = (αρ1β, β⁻¹ρ2α⁻¹)."""
    a1 = compose(alpha, compose(rho1, beta))
    a2 = compose(inverse(beta), compose(rho2, inverse(alpha)))
    return a1, a2


def random_permutation(rng: random.Random, n: int) -> Permutation:
    return Permutation._trusted(tuple(rng.sample(range(n), n)))


def image_rectangle(m: CompatMatrix, r: Rectangle, alpha, beta) -> Rectangle:
    ia, ib = inverse(alpha), inverse(beta)
    rows = [m.index_of[tuple(compose(alpha, compose(m.indices[i], beta)))] for i in r.rows]
    cols = [m.index_of[tuple(compose(ib, compose(m.indices[j], ia)))] for j in r.cols]
    return Rectangle.of(rows, cols)


def randomized_cover_from_rectangle(m: CompatMatrix, r: Rectangle, seed: int) -> RectangleCover:
    """Union of ℓ random images μ_{α,β}(r); ``complete`` says whether it covers every 1-entry."""
    if m.variant is not Variant.BIPARTITE:
        raise WorkbenchError("INVALID_VARIANT", "randomized cover is defined for BIPARTITE matrices")
    if m.k < 2:
        raise WorkbenchError("INVALID_K", "needs k >= 2")
    if not r.size or not is_rectangle(m, r):
        raise WorkbenchError("NOT_A_RECTANGLE")
    rng = random.Random(seed)
    ell = cover_length(m.k, r.size)
    rects = []
    for _ in range(ell):
        alpha = random_permutation(rng, m.k)
        beta = random_permutation(rng, m.k)
        img = image_rectangle(m, r, alpha, beta)
        if not is_rectangle(m, img):
            raise WorkbenchError("NOT_A_RECTANGLE", "image of a rectangle is not a rectangle")
        rects.append(img)
    ok, _ = verify_cover(m, rects)
    return RectangleCover(rects, optimal=False, complete=ok, meta={"ell": ell, "seed": seed})


# clique embedding and size bounds -----------------------------------------------


def respects_bipartition(rho: Sequence[int], C: set[int]) -> bool:
    """True iff ρ (0-based) maps every element of C outside C."""
    return all(rho[x] not in C for x in C)


def embed_clique_rectangle(
    clique: CompatMatrix, r: Rectangle, C: Iterable[int], bip: CompatMatrix | None = None
) -> Rectangle:
    """Map a CLIQUE(k) rectangle inside S_C × S_C to a BIPARTITE(k) rectangle.

    ``C`` is a 1-based k-subset of [2k]; rows go through ρ ↦ d⁻¹ρc and columns
    through ρ ↦ c⁻¹ρd with c, d enumerating C and its complement increasingly.
    """
    k = clique.k
    c = sorted(x - 1 for x in C)
    if len(c) != k or len(set(c)) != k or not all(0 <= x < 2 * k for x in c):
        raise WorkbenchError("INVALID_SPEC", f"C must be a {k}-subset of [{2 * k}]")
    d = [x for x in range(2 * k) if x not in set(c)]
    cset = set(c)
    d_inv = {x: i for i, x in enumerate(d)}
    c_inv = {x: i for i, x in enumerate(c)}
    bip = bip or build_matrix(k, Variant.BIPARTITE)
    rows, cols = [], []
    for i in r.rows:
        rho = clique.indices[i]
        if not respects_bipartition(rho, cset):
            raise WorkbenchError("NOT_IN_SC", f"row {rho} does not respect C")
        rows.append(bip.index_of[tuple(d_inv[rho[c[x]]] for x in range(k))])
    for j in r.cols:
        rho = clique.indices[j]
        if not respects_bipartition(rho, cset):
            raise WorkbenchError("NOT_IN_SC", f"column {rho} does not respect C")
        cols.append(bip.index_of[tuple(c_inv[rho[d[x]]] for x in range(k))])
    return Rectangle.of(rows, cols)


def bipartite_bound(k: int, ck: int) -> float:
    return math.factorial(k) * math.factorial(k - 1) / ck * 2 * k * math.log(k)


def clique_bound(k: int, ck: int, factor: float = 2.0) -> float:
    """(2k−1)!·C_k⁻¹·factor·k·ln k; factor 2 is the stated bound, 1 the summed one."""
    return math.factorial(2 * k - 1) / ck * factor * k * math.log(k)


def check_size_bound(m: CompatMatrix, ck: int, rect: Rectangle | None = None) -> dict:
    rect = rect or max_rectangle(m)
    k = m.k
    if m.variant is Variant.BIPARTITE:
        bound = bipartite_bound(k, ck)
        report = {"variant": "bipartite", "k": k, "C_k": ck, "max_rectangle": rect.size, "bound": bound}
        report["holds"] = rect.size <= bound + 1e-9
        return report
    bound = clique_bound(k, ck)
    tight = clique_bound(k, ck, factor=1.0)
    report = {
        "variant": "clique",
        "k": k,
        "C_k": ck,
        "max_rectangle": rect.size,
        "bound": bound,
        "summed_bound": tight,
        "holds": rect.size <= bound + 1e-9,
        "holds_summed": rect.size <= tight + 1e-9,
    }
    return report


def clique_bound_via_embedding(clique: CompatMatrix, r: Rectangle, ck: int) -> dict:
    """Split a CLIQUE(k) rectangle over the bipartitions {C, [2k]−C} and embed each part.

    Checks every embedded piece is a BIPARTITE(k) rectangle within the bipartite
    bound, that the pieces account for every cell, and sums the piece bounds.
    """
    k = clique.k
    bip = build_matrix(k, Variant.BIPARTITE)
    per_piece = bipartite_bound(k, ck)
    covered = set()
    pieces = []
    ok = True
    for rest in combinations(range(2, 2 * k + 1), k - 1):
        C = (1,) + rest
        cset = {x - 1 for x in C}
        rows = [i for i in r.rows if respects_bipartition(clique.indices[i], cset)]
        cols = [j for j in r.cols if respects_bipartition(clique.indices[j], cset)]
        if not rows or not cols:
            continue
        sub = Rectangle(tuple(rows), tuple(cols))
        emb = embed_clique_rectangle(clique, sub, C, bip)
        good = is_rectangle(bip, emb) and emb.size == sub.size and emb.size <= per_piece + 1e-9
        ok &= good
        covered.update(sub.cells())
        pieces.append({"C": list(C), "size": sub.size, "embedded_is_rectangle": good})
    accounted = covered == set(r.cells())
    n_parts = math.comb(2 * k - 1, k - 1)
    return {
        "k": k,
        "rectangle_size": r.size,
        "pieces": pieces,
        "all_cells_accounted": accounted,
        "piece_bound": per_piece,
        "summed_bound": n_parts * per_piece,
        "stated_bound": clique_bound(k, ck),
        "holds": ok and accounted and r.size <= clique_bound(k, ck) + 1e-9,
    }


def ck_table_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    fields = ["k", "dimension", "ones", "C_k", "optimal", "max_rectangle", "lemma_bound"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({f: row.get(f) for f in fields})
    return buf.getvalue()


def cover_to_json(m: CompatMatrix, cover: RectangleCover) -> str:
    d = {"variant": m.variant.value, "k": m.k}
    d.update(cover.to_dict())
    return json.dumps(d, separators=(",", ":"))

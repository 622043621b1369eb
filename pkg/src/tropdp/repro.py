"""Acceptance checks: each criterion recomputes its quantities from scratch and
compares against closed forms or brute-force oracles.

``run_all`` returns one :class:`CriterionResult` per check; the CLI ``repro``
subcommand and the acceptance tests both go through here.
"""

from __future__ import annotations

import math
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from scipy.stats import chisquare

from . import compat, graphs, oracle, perm, rects
from .circuit import calculates
from .compile import compile_dst_pw, compile_held_karp, compile_is, compile_tsp_pw
from .graphs import PathDecomposition, cv, split_v


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    seconds: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id:2d} {self.name} ({self.seconds:.2f}s)"

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "passed": self.passed, "seconds": round(self.seconds, 3), "detail": self.detail}


def _valuations(rng: random.Random, names, count: int, lo: int, hi: int) -> list[dict]:
    names = sorted(names)
    return [{x: rng.randint(lo, hi) for x in names} for _ in range(count)]


# 1 -------------------------------------------------------------------------------


def is_oracle(seed: int = 1, instances: int = 200) -> dict:
    rng = random.Random(seed)
    mismatches = 0
    for t in range(instances):
        nv = rng.randint(1, 14)
        band = rng.randint(1, 4)
        g, d = graphs.random_banded_graph(nv, band, rng.uniform(0.2, 0.9), rng.randrange(2**31))
        c = compile_is(g, d)
        w = {v: rng.randint(-50, 50) for v in g.vertices}
        if c.evaluate(w) != oracle.brute_is(g, w).optimum:
            mismatches += 1
    return {"ok": mismatches == 0, "instances": instances, "mismatches": mismatches, "limit_s": 10}


# 2 -------------------------------------------------------------------------------


def is_corpus(seed: int = 2) -> list[tuple]:
    """Small IS instances: paths, a triangle, every labelled graph on 4 vertices, random banded graphs."""
    out = []
    g, _ = graphs.simple_graph(["a"], [], False, "K1")
    out.append((g, PathDecomposition.of([["a"]])))
    g, _ = graphs.simple_graph(["a", "b", "c"], [("a", "b"), ("b", "c")], False, "P3")
    out.append((g, PathDecomposition.of([["a", "b"], ["b", "c"]])))
    out.append(graphs.simple_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")], False, "K3"))
    vs = ["p", "q", "r", "s"]
    pairs = list(combinations(vs, 2))
    for mask in range(1 << len(pairs)):
        es = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        out.append(graphs.simple_graph(vs, es, False, f"g4_{mask}"))
    rng = random.Random(seed)
    for _ in range(40):
        out.append(graphs.random_banded_graph(rng.randint(5, 10), rng.randint(1, 4), rng.uniform(0.2, 0.8), rng.randrange(2**31)))
    return out


def is_semantics(seed: int = 2) -> dict:
    corpus = is_corpus(seed)
    failures = [g.name for g, d in corpus if not calculates(compile_is(g, d), oracle.is_polynomial(g))]
    return {"ok": not failures, "graphs": len(corpus), "failures": failures[:10]}


# 3 -------------------------------------------------------------------------------


def tsp_oracle(seed: int = 3, random_graphs: int = 50, trials: int = 100) -> dict:
    rng = random.Random(seed)
    rows = []
    cases = []
    for n, k in [(3, 1), (4, 1), (3, 2), (4, 2)]:
        g, d = graphs.gen_dtsp_graph(n, k)
        cases.append((g.name, g, d))
    for t in range(random_graphs):
        g, d = graphs.random_hamiltonian_digraph(rng.randint(3, 8), rng.uniform(0.1, 0.6), rng.randrange(2**31))
        cases.append((f"random{t}", g, d))
    bad = 0
    for name, g, d in cases:
        vals = _valuations(rng, g.edge_vars(), trials, 0, 50)
        truth = oracle.tsp_optima(g, vals)
        pw = compile_tsp_pw(g, d).evaluate_batch(vals)
        hk = compile_held_karp(graph=g).evaluate_batch(vals)
        ok = pw == truth and hk == truth
        bad += not ok
        if name.startswith("G_"):
            rows.append({"graph": name, "ok": ok})
    return {"ok": bad == 0, "instances": len(cases), "trials": trials, "failures": bad, "families": rows, "limit_s": 60}


# 4 -------------------------------------------------------------------------------


def dst_oracle(seed: int = 4, random_graphs: int = 50, trials: int = 100) -> dict:
    rng = random.Random(seed)
    cases = []
    for n, k in [(2, 1), (3, 1), (2, 2)]:
        g, d = graphs.gen_dst_graph(n, k)
        cases.append((g.name, g, d, 7))
    for t in range(random_graphs):
        g, d = graphs.random_rooted_digraph(rng.randint(2, 7), rng.randint(1, 3), rng.uniform(0.1, 0.5), rng.randrange(2**31))
        cases.append((f"random{t}", g, d, 4))
    bad = 0
    count_bad = 0
    rows = []
    for name, g, d, width in cases:
        n_trials = trials if g.n_vertices <= 7 else 20
        vals = _valuations(rng, g.edge_vars(), n_trials, 0, 50)
        truth = oracle.dst_optima(g, vals)
        got = compile_dst_pw(g, d, max_width=width).evaluate_batch(vals)
        ok = got == truth
        bad += not ok
        counted = None
        if g.n_vertices <= 7:
            counted = oracle.count_arborescences(g)
            count_ok = counted == oracle.matrix_tree_count(g)
            count_bad += not count_ok
        if name.startswith("H_"):
            rows.append({"graph": name, "ok": ok, "arborescences": counted})
    return {"ok": bad == 0 and count_bad == 0, "instances": len(cases), "value_failures": bad, "count_failures": count_bad, "families": rows}


# 5 -------------------------------------------------------------------------------


def counting_identities() -> dict:
    rows = []
    for n, k in [(3, 2), (4, 2), (3, 3)]:
        g, _ = graphs.gen_dtsp_graph(n, k)
        got = len(oracle.enumerate_ham_cycles(g))
        want = math.factorial(k - 1) * math.factorial(k) ** (n - 1)
        rows.append({"family": "dtsp-cycles", "n": n, "k": k, "enumerated": got, "formula": want, "ok": got == want})
    for n, k in [(2, 1), (3, 1), (3, 2)]:
        got = len(oracle.enumerate_nice_cycles(n, k))
        want = 2 * math.factorial(2 * k) ** (n - 1) * math.factorial(2 * k - 1)
        rows.append({"family": "dst-nice-cycles", "n": n, "k": k, "enumerated": got, "formula": want, "ok": got == want})
    return {"ok": all(r["ok"] for r in rows), "rows": rows, "limit_s": 300}


# 6 -------------------------------------------------------------------------------


def group_identities(max_k: int = 5) -> dict:
    sizes = []
    for k in range(1, max_k + 1):
        sizes.append(
            {
                "k": k,
                "single": (len(perm.enumerate_class(k, perm.SINGLE_CYCLE)), math.factorial(k - 1)),
                "two_cycles": (len(perm.enumerate_class(2 * k, perm.ALL_TWO_CYCLES)), perm.double_factorial(2 * k - 1)),
                "k_k": (len(perm.enumerate_class(2 * k, perm.TWO_K_CYCLES)), math.factorial(2 * k - 1) // k),
            }
        )
    sizes_ok = all(a == b for row in sizes for key in ("single", "two_cycles", "k_k") for a, b in [row[key]])
    orbit_ok = conj_ok = True
    for k in range(1, max_k + 1):
        by_type: dict[tuple, set] = {}
        for p in perm.all_permutations(k):
            by_type.setdefault(perm.cycle_type(p), set()).add(tuple(p))
        for cls in by_type.values():
            for rho in cls:
                counts = perm.conjugation_orbit_counts(rho)
                orbit_ok &= set(counts) == cls
                conj_ok &= set(counts.values()) == {math.factorial(k) // len(cls)}
    completions = []
    for k in range(2, 5):
        vals = Counter(perm.count_completions(r) for r in perm.enumerate_class(2 * k, perm.ALL_TWO_CYCLES))
        completions.append({"k": k, "counts": dict(vals), "formula": perm.double_factorial(2 * k - 2)})
    comp_ok = all(set(row["counts"]) == {row["formula"]} for row in completions)
    return {
        "ok": sizes_ok and orbit_ok and conj_ok and comp_ok,
        "class_sizes": sizes_ok,
        "orbit_is_class": orbit_ok,
        "conjugator_count_constant": conj_ok,
        "completions": completions,
    }


# 7 -------------------------------------------------------------------------------


def covers_and_bounds(budget: float = 120.0) -> dict:
    ck = {}
    rows = []
    for k in range(1, 5):
        m = compat.build_matrix(k, "bipartite")
        cov = compat.min_cover(m, budget)
        ok, _ = compat.verify_cover(m, cov)
        ck[k] = cov.size
        rows.append({"k": k, "C_k": cov.size, "optimal": cov.optimal, "verified": ok})
    exact_ok = ck[1] == 1 and ck[2] == 2 and all(r["optimal"] and r["verified"] for r in rows)
    bounds = []
    for k in (2, 3, 4):
        m = compat.build_matrix(k, "bipartite")
        bounds.append(compat.check_size_bound(m, ck[k]))
    clique = []
    for k in (2, 3):
        cm = compat.build_matrix(k, "clique")
        reports = [compat.clique_bound_via_embedding(cm, r, ck[k]) for r in compat.maximal_rectangles(cm)]
        clique.append(
            {
                "k": k,
                "rectangles": len(reports),
                "max_rectangle": max(r["rectangle_size"] for r in reports),
                "stated_bound": reports[0]["stated_bound"],
                "holds": all(r["holds"] for r in reports),
            }
        )
    ok = exact_ok and all(b["holds"] for b in bounds) and all(c["holds"] for c in clique)
    return {"ok": ok, "covers": rows, "bipartite_bounds": bounds, "clique_bounds": clique, "limit_s": 300}


# 8 -------------------------------------------------------------------------------


def randomized_cover(seed: int = 8, tuples: int = 10_000, retries: int = 10) -> dict:
    rng = random.Random(seed)
    violations = 0
    for k in range(1, 7):
        for _ in range(tuples):
            r1 = compat.random_permutation(rng, k)
            sigma = perm.Permutation._trusted(_random_k_cycle(rng, k))
            r2 = perm.compose(sigma, perm.inverse(r1))
            a = compat.random_permutation(rng, k)
            b = compat.random_permutation(rng, k)
            x1, x2 = compat.mu(a, b, r1, r2)
            violations += not perm.is_single_cycle(perm.compose(x2, x1))
    rows = []
    for k in (3, 4):
        m = compat.build_matrix(k, "bipartite")
        r = compat.max_rectangle(m)
        attempts = None
        for t in range(retries):
            cov = compat.randomized_cover_from_rectangle(m, r, seed * 1000 + t)
            if cov.complete and compat.verify_cover(m, cov)[0]:
                attempts = t + 1
                break
        rows.append({"k": k, "rectangle": r.size, "ell": compat.cover_length(k, r.size), "attempts": attempts})
    ok = violations == 0 and all(row["attempts"] is not None for row in rows)
    return {"ok": ok, "mu_violations": violations, "tuples_per_k": tuples, "covers": rows}


def _random_k_cycle(rng: random.Random, k: int) -> tuple[int, ...]:
    order = rng.sample(range(k), k)
    img = [0] * k
    for i in range(k):
        img[order[i]] = order[(i + 1) % k]
    return tuple(img)


# 9 -------------------------------------------------------------------------------


def decomposition_corpus() -> list[tuple[str, object, list[str]]]:
    """Homogeneous compiled circuits with their balance sets X."""
    out = []
    for N in (4, 5):
        out.append((f"held-karp N={N}", compile_held_karp(N), [f"x({i},{i % N + 1})" for i in range(1, N + 1)]))
    for n, k in [(3, 1), (3, 2), (4, 2), (4, 3)]:
        g, d = graphs.gen_dtsp_graph(n, k)
        out.append((f"dtsp {g.name}", compile_tsp_pw(g, d, max_width=8), rects.dtsp_xbar(n, k)))
    for n, k in [(3, 1), (3, 2)]:
        g, d = graphs.gen_tsp_graph(n, k)
        X = [g.edge_var(split_v(c, 1, 1), split_v(c % n + 1, 1, -1)) for c in range(1, n + 1)]
        out.append((f"tsp {g.name}", compile_tsp_pw(g, d), X))
    for n, k in [(2, 1), (3, 1)]:
        g, d = graphs.gen_dst_graph(n, k)
        if n == 2:
            X = [g.edge_var(u, v) for u, v in graphs.layer_edge_sets(g)[1]]
        else:
            X = [g.edge_var(cv(c, 1), cv(c + 1, 1)) for c in range(1, n)]
        out.append((f"dst {g.name}", compile_dst_pw(g, d), X))
    return out


def decomposition() -> dict:
    rows = []
    for name, c, X in decomposition_corpus():
        rs = rects.decompose_balanced(c, X)
        chk = rects.check_decomposition(c, X, rs)
        rows.append({"circuit": name, "gates": chk.gates, "rectangles": chk.rectangles, "ok": chk.ok})
    return {"ok": all(r["ok"] for r in rows), "rows": rows}


# 10 ------------------------------------------------------------------------------


def thin_rectangles(seed: int = 10, samples: int = 100_000) -> dict:
    ex = rects.exhaustive_thin_check(2)
    sm = rects.sample_thin_check(2, samples, seed)
    return {
        "ok": ex.violations == 0 and sm.violations == 0,
        "exhaustive": ex.to_dict(),
        "sampled": sm.to_dict(),
        "limit_s": 120,
    }


# 11 ------------------------------------------------------------------------------


def rectangle_bounds(budget: float = 60.0) -> dict:
    rows = []
    for n, k in [(4, 2), (4, 3)]:
        ck = compat.min_cover(compat.build_matrix(k, "bipartite"), budget)
        g, d = graphs.gen_dtsp_graph(n, k)
        c = compile_tsp_pw(g, d, max_width=8)
        rs = rects.decompose_balanced(c, rects.dtsp_xbar(n, k))
        reps = [rects.check_rectangle_bound_dtsp(r, n, k, ck.size) for r in rs]
        rows.append(
            {
                "n": n,
                "k": k,
                "C_k": ck.size,
                "C_k_optimal": ck.optimal,
                "rectangles": len(reps),
                "largest": max(r["product_size"] for r in reps),
                "bound": reps[0]["bound"],
                "holds": ck.optimal and all(r["holds"] for r in reps),
                "mixed_matchings_ok": all(r["mixed_ok"] for r in reps),
            }
        )
    g, d = graphs.gen_dst_graph(3, 1)
    c = compile_dst_pw(g, d)
    X = [g.edge_var(cv(col, 1), cv(col + 1, 1)) for col in range(1, 3)]
    rs = rects.decompose_balanced(c, X)
    col = [rects.check_dst_colorful(r, g) for r in rs]
    dst = {
        "rectangles": len(rs),
        "mixed_layers": sum(len(x["mixed_layers"]) for x in col),
        "holds": all(x["holds"] for x in col),
    }
    ok = all(r["holds"] and r["mixed_matchings_ok"] for r in rows) and dst["holds"]
    return {"ok": ok, "dtsp": rows, "dst": dst}


# 12 ------------------------------------------------------------------------------


def sampler_uniformity(seed: int = 12, samples: int = 40_000) -> dict:
    outcomes = sorted(graphs.nice_cycle_key(c) for c in oracle.enumerate_nice_cycles(2, 1))
    rng = random.Random(seed)
    counts = Counter(graphs.nice_cycle_key(graphs.sample_nice_cycle(2, 1, rng)) for _ in range(samples))
    observed = [counts.get(o, 0) for o in outcomes]
    stray = samples - sum(observed)
    p = float(chisquare(observed).pvalue)
    a = [graphs.sample_nice_cycle(2, 1, seed + i) for i in range(50)]
    b = [graphs.sample_nice_cycle(2, 1, seed + i) for i in range(50)]
    return {
        "ok": p > 0.001 and stray == 0 and a == b,
        "counts": observed,
        "p_value": p,
        "outside_support": stray,
        "deterministic": a == b,
    }


# 13 ------------------------------------------------------------------------------


def certificates() -> dict:
    bad = []
    checked = 0
    for k in range(2, 5):
        g, d = graphs.gen_is_graph(k)
        rep = graphs.verify_path_decomposition(g, d)
        checked += 1
        if not rep.valid or rep.width > k + 1:
            bad.append((g.name, rep.width))
    for n in range(2, 7):
        for k in range(1, 4):
            for gen, limit in ((graphs.gen_dtsp_graph, 3 * k), (graphs.gen_tsp_graph, 3 * k), (graphs.gen_dst_graph, 4 * k)):
                g, d = gen(n, k)
                rep = graphs.verify_path_decomposition(g, d)
                checked += 1
                if not rep.valid or rep.width > limit:
                    bad.append((g.name, rep.width))
    bij = []
    for n, k in [(3, 1), (3, 2)]:
        g, _ = graphs.gen_dtsp_graph(n, k)
        gbar, _ = graphs.gen_tsp_graph(n, k)
        directed = oracle.enumerate_ham_cycles(g)
        undirected = {graphs.canonical_cycle(gbar, c) for c in oracle.enumerate_ham_cycles(gbar, max_vertices=18)}
        images = {graphs.directed_to_undirected_cycle(gbar, c) for c in directed}
        roundtrip = all(graphs.sequence_to_cycle(g, graphs.cycle_to_sequence(g, c)) == graphs.canonical_cycle(g, c) for c in directed)
        bij.append(
            {
                "n": n,
                "k": k,
                "directed": len(directed),
                "undirected": len(undirected),
                "bijective": images == undirected and len(images) == len(directed),
                "sequence_roundtrip": roundtrip,
            }
        )
    ok = not bad and all(r["bijective"] and r["sequence_roundtrip"] for r in bij)
    return {"ok": ok, "decompositions": checked, "violations": bad, "bijection": bij}


CRITERIA: list[tuple[int, str, Callable[[], dict], float | None]] = [
    (1, "IS circuits match the brute-force optimum", is_oracle, 10.0),
    (2, "IS circuits calculate the enumerated IS polynomial", is_semantics, None),
    (3, "TSP circuits match the brute-force optimum", tsp_oracle, 60.0),
    (4, "DST circuits match the brute-force optimum", dst_oracle, None),
    (5, "Hamiltonian and nice cycle counts", counting_identities, 300.0),
    (6, "Symmetric group identities", group_identities, None),
    (7, "Exact covers and rectangle size bounds", covers_and_bounds, 300.0),
    (8, "Conjugation map and randomized cover", randomized_cover, None),
    (9, "Balanced rectangle decomposition", decomposition, None),
    (10, "Thin rectangles in G_k", thin_rectangles, 120.0),
    (11, "Rectangle bounds for DTSP and DST", rectangle_bounds, None),
    (12, "Nice cycle sampler uniformity", sampler_uniformity, None),
    (13, "Decomposition certificates and cycle bijection", certificates, None),
]


def run_criterion(cid: int) -> CriterionResult:
    for i, name, fn, limit in CRITERIA:
        if i == cid:
            t = time.perf_counter()
            try:
                detail = fn()
                passed = bool(detail.get("ok"))
            except Exception as e:  # a crash is a failed criterion, reported with its cause
                detail = {"ok": False, "error": f"{type(e).__name__}: {e}"}
                passed = False
            secs = time.perf_counter() - t
            if limit is not None:
                detail["limit_s"] = limit
                passed = passed and secs < limit
            return CriterionResult(i, name, passed, secs, detail)
    raise KeyError(cid)


def run_all(ids: list[int] | None = None) -> list[CriterionResult]:
    ids = ids or [c[0] for c in CRITERIA]
    return [run_criterion(i) for i in sorted(ids)]


def summary(results: list[CriterionResult]) -> dict:
    return {
        "passed": sum(r.passed for r in results),
        "total": len(results),
        "criteria": [r.to_dict() for r in results],
    }


"""Measurement tables and figures: each table is written as CSV with a PNG next to it."""

from __future__ import annotations

import csv
import math
import random
from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import compat, graphs, oracle, rects  # noqa: E402
from .compile import FloydWarshallDag, compile_held_karp, compile_is, compile_tsp_pw  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.4),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.bbox": "tight",
}


def _write_csv(path: Path, rows: list[dict]) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return path


def gate_count_rows(seed: int) -> list[dict]:
    """Measured gate-count constants for the IS sweep, Held–Karp and Floyd–Warshall."""
    rng = random.Random(seed)
    rows = []
    for t in range(30):
        nv, band = rng.randint(4, 14), rng.randint(1, 4)
        g, d = graphs.random_banded_graph(nv, band, rng.uniform(0.2, 0.8), rng.randrange(2**31))
        c = compile_is(g, d)
        w = max(len(b) for b in d.bags) - 1
        scale = 2 ** (w + 1) * len(d.bags)
        rows.append({"algorithm": "is", "size": nv, "width": w, "gates": c.size(), "shape": scale, "ratio": c.size() / scale})
    for N in range(3, 11):
        c = compile_held_karp(N)
        scale = N * N * 2**N
        rows.append({"algorithm": "held-karp", "size": N, "width": "", "gates": c.size(), "shape": scale, "ratio": c.size() / scale})
    for N in range(2, 16):
        gates = FloydWarshallDag(N).base.size()
        rows.append({"algorithm": "floyd-warshall", "size": N, "width": "", "gates": gates, "shape": N**3, "ratio": gates / N**3})
    return rows


def cover_rows(budget: float) -> list[dict]:
    rows = []
    for k in range(1, 5):
        m = compat.build_matrix(k, "bipartite")
        cov = compat.min_cover(m, budget)
        r = compat.max_rectangle(m)
        rows.append(
            {
                "k": k,
                "dimension": m.dim,
                "ones": m.ones(),
                "C_k": cov.size,
                "optimal": cov.optimal,
                "max_rectangle": r.size,
                "lemma_bound": round(compat.bipartite_bound(k, cov.size), 6) if k > 1 else "",
            }
        )
    return rows


def rectangle_rows(ck: dict[int, int]) -> list[dict]:
    rows = []
    for n, k in [(3, 2), (4, 2), (4, 3)]:
        g, d = graphs.gen_dtsp_graph(n, k)
        c = compile_tsp_pw(g, d, max_width=8)
        for i, r in enumerate(rects.decompose_balanced(c, rects.dtsp_xbar(n, k))):
            rep = rects.check_rectangle_bound_dtsp(r, n, k, ck[k])
            rows.append({"n": n, "k": k, "rectangle": i, "product_size": rep["product_size"], "bound": round(rep["bound"], 6), "holds": rep["holds"]})
    return rows


def sampler_rows(seed: int, samples: int) -> list[dict]:
    outcomes = sorted(graphs.nice_cycle_key(c) for c in oracle.enumerate_nice_cycles(2, 1))
    rng = random.Random(seed)
    counts = Counter(graphs.nice_cycle_key(graphs.sample_nice_cycle(2, 1, rng)) for _ in range(samples))
    return [{"cycle": " ".join(o), "count": counts.get(o, 0), "expected": samples / len(outcomes)} for o in outcomes]


def _plot_gates(rows, path: Path):
    fig, ax = plt.subplots()
    for alg, marker in (("is", "o"), ("held-karp", "s"), ("floyd-warshall", "^")):
        pts = [(r["shape"], r["gates"]) for r in rows if r["algorithm"] == alg]
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], marker, label=alg, alpha=0.8)
    ax.set_xlabel("asymptotic shape (2^(w+1)·bags, N²2^N, N³)")
    ax.set_ylabel("gates")
    ax.legend(frameon=False)
    fig.savefig(path)
    plt.close(fig)


def _plot_covers(rows, path: Path):
    fig, ax = plt.subplots()
    ks = [r["k"] for r in rows]
    ax.semilogy(ks, [r["C_k"] for r in rows], "o-", label="C_k (exact)")
    ax.semilogy(ks, [math.factorial(k) for k in ks], "--", color="grey", label="k!")
    ax.semilogy(ks, [r["max_rectangle"] for r in rows], "s-", label="largest rectangle")
    ax.set_xticks(ks)
    ax.set_xlabel("k")
    ax.legend(frameon=False)
    fig.savefig(path)
    plt.close(fig)


def _plot_rectangles(rows, path: Path):
    fig, ax = plt.subplots()
    for (n, k), marker in (((3, 2), "o"), ((4, 2), "s"), ((4, 3), "^")):
        sel = [r for r in rows if r["n"] == n and r["k"] == k]
        if not sel:
            continue
        ax.plot([r["bound"] for r in sel], [r["product_size"] for r in sel], marker, label=f"G_{{{n},{k}}}", alpha=0.8)
    lim = max(r["bound"] for r in rows) * 1.05
    ax.plot([0, lim], [0, lim], ":", color="grey")
    ax.set_xlabel("size bound")
    ax.set_ylabel("|g·h|")
    ax.legend(frameon=False)
    fig.savefig(path)
    plt.close(fig)


def _plot_sampler(rows, path: Path):
    fig, ax = plt.subplots()
    xs = range(len(rows))
    ax.bar(xs, [r["count"] for r in rows], color="#4477aa")
    ax.axhline(rows[0]["expected"], color="black", lw=0.8, ls="--")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"cycle {i + 1}" for i in xs])
    ax.set_ylabel("samples")
    fig.savefig(path)
    plt.close(fig)


def write_report(out: str | Path, seed: int, budget: float = 60.0, samples: int = 40_000) -> list[Path]:
    """Write every table as CSV plus its figure; returns the written paths."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    with plt.rc_context(STYLE):
        gates = gate_count_rows(seed)
        written += [_write_csv(out / "gate_counts.csv", gates), out / "gate_counts.png"]
        _plot_gates(gates, out / "gate_counts.png")
        covers = cover_rows(budget)
        written += [_write_csv(out / "covers.csv", covers), out / "covers.png"]
        _plot_covers(covers, out / "covers.png")
        ck = {r["k"]: r["C_k"] for r in covers}
        rect = rectangle_rows(ck)
        written += [_write_csv(out / "dtsp_rectangles.csv", rect), out / "dtsp_rectangles.png"]
        _plot_rectangles(rect, out / "dtsp_rectangles.png")
        samp = sampler_rows(seed, samples)
        written += [_write_csv(out / "sampler.csv", samp), out / "sampler.png"]
        _plot_sampler(samp, out / "sampler.png")
    return written

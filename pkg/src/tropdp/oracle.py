"""Brute-force ground truth.

Nothing here touches the compilers: structures are enumerated by plain
backtracking and optima are taken over the enumerations.  Enumerations are
cached per graph, and optima over many valuations are vectorised with numpy
because H_{2,2} alone has millions of arborescences.
"""

from __future__ import annotations

import json
from array import array
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ScaleExceeded, WorkbenchError
from .graphs import GraphInstance, cv
from .poly import Polynomial


@dataclass
class OracleResult:
    optimum: int
    witness: Any
    count: int

    def to_dict(self) -> dict:
        w = self.witness
        if isinstance(w, (set, frozenset)):
            w = sorted(w)
        elif isinstance(w, dict):
            w = {str(a): b for a, b in sorted(w.items())}
        else:
            w = list(w)
        return {"optimum": self.optimum, "witness": w, "count": self.count}


def _limit(g: GraphInstance, cap: int, what: str):
    if g.n_vertices > cap:
        raise ScaleExceeded("SCALE_EXCEEDED", f"{what} enumeration limited to {cap} vertices, got {g.n_vertices}")


# independent sets ------------------------------------------------------------


@lru_cache(maxsize=64)
def _is_family(g: GraphInstance) -> tuple[tuple[int, ...], ...]:
    n = g.n_vertices
    nbr = [0] * n
    for u, v in g.edges:
        a, b = g.index(u), g.index(v)
        nbr[a] |= 1 << b
        nbr[b] |= 1 << a
    out: list[tuple[int, ...]] = []

    def rec(i: int, chosen: list[int], banned: int):
        if i == n:
            out.append(tuple(chosen))
            return
        rec(i + 1, chosen, banned)
        if not banned >> i & 1:
            chosen.append(i)
            rec(i + 1, chosen, banned | nbr[i])
            chosen.pop()

    rec(0, [], 0)
    out.sort()
    return tuple(out)


def enumerate_is(g: GraphInstance, max_vertices: int = 24) -> list[frozenset[str]]:
    """All independent sets (∅ included), ordered by their sorted vertex-index tuples."""
    _limit(g, max_vertices, "independent-set")
    return [frozenset(g.vertices[i] for i in s) for s in _is_family(g)]


def is_polynomial(g: GraphInstance, max_vertices: int = 24) -> Polynomial:
    return Polynomial(tuple(s) for s in enumerate_is(g, max_vertices))


def brute_is(g: GraphInstance, weights: Mapping[str, int], max_vertices: int = 24) -> OracleResult:
    _limit(g, max_vertices, "independent-set")
    fam = _is_family(g)
    best, arg = None, None
    for s in fam:
        val = sum(weights[g.vertices[i]] for i in s)
        if best is None or val > best:
            best, arg = val, s
    return OracleResult(best, frozenset(g.vertices[i] for i in arg), len(fam))


# Hamiltonian cycles ----------------------------------------------------------


@lru_cache(maxsize=64)
def _ham_cycles(g: GraphInstance) -> tuple[tuple[int, ...], ...]:
    n = g.n_vertices
    adj = [[] for _ in range(n)]
    for u, v in g.edges:
        a, b = g.index(u), g.index(v)
        adj[a].append(b)
        if not g.directed:
            adj[b].append(a)
    for lst in adj:
        lst.sort()
    out: list[tuple[int, ...]] = []
    if n < 2 or (not g.directed and n < 3):
        return ()
    path = [0]
    used = [False] * n
    used[0] = True

    def rec():
        u = path[-1]
        if len(path) == n:
            if 0 in adj[u]:
                if g.directed or path[1] < path[-1]:
                    out.append(tuple(path))
            return
        for v in adj[u]:
            if not used[v]:
                used[v] = True
                path.append(v)
                rec()
                path.pop()
                used[v] = False

    rec()
    out.sort()
    return tuple(out)


def enumerate_ham_cycles(g: GraphInstance, max_vertices: int = 12) -> list[tuple[str, ...]]:
    """Hamiltonian cycles in canonical form (start at the first vertex; undirected: smaller direction)."""
    _limit(g, max_vertices, "Hamiltonian-cycle")
    return [tuple(g.vertices[i] for i in c) for c in _ham_cycles(g)]


def cycle_monomial(g: GraphInstance, cycle: Sequence[str]) -> tuple[str, ...]:
    m = len(cycle)
    return tuple(sorted(g.edge_var(cycle[i], cycle[(i + 1) % m]) for i in range(m)))


def tsp_polynomial(g: GraphInstance, max_vertices: int = 12) -> Polynomial:
    return Polynomial(cycle_monomial(g, c) for c in enumerate_ham_cycles(g, max_vertices))


@lru_cache(maxsize=64)
def _cycle_var_matrix(g: GraphInstance) -> tuple[list[str], np.ndarray]:
    names = sorted(g.edge_vars())
    pos = {x: i for i, x in enumerate(names)}
    cycles = enumerate_ham_cycles(g, max_vertices=64)
    mat = np.array([[pos[x] for x in cycle_monomial(g, c)] for c in cycles], dtype=np.int32)
    return names, mat.reshape(len(cycles), g.n_vertices)


def brute_tsp(g: GraphInstance, weights: Mapping[str, int], max_vertices: int = 12) -> OracleResult:
    _limit(g, max_vertices, "Hamiltonian-cycle")
    cycles = enumerate_ham_cycles(g, max_vertices)
    if not cycles:
        raise WorkbenchError("NO_HAMILTONIAN_CYCLE")
    best, arg = None, None
    for c in cycles:
        val = sum(weights[x] for x in cycle_monomial(g, c))
        if best is None or val < best:
            best, arg = val, c
    return OracleResult(best, arg, len(cycles))


def tsp_optima(g: GraphInstance, valuations: Sequence[Mapping[str, int]], max_vertices: int = 12) -> list[int]:
    """brute_tsp optimum for many valuations at once."""
    _limit(g, max_vertices, "Hamiltonian-cycle")
    names, mat = _cycle_var_matrix(g)
    if mat.shape[0] == 0:
        raise WorkbenchError("NO_HAMILTONIAN_CYCLE")
    return _min_over(names, mat, valuations)


def _min_over(names: list[str], mat: np.ndarray, valuations) -> list[int]:
    out = []
    for v in valuations:
        w = np.array([v[x] for x in names], dtype=np.int64)
        out.append(int(w[mat].sum(axis=1).min()))
    return out


# arborescences -----------------------------------------------------------------


@lru_cache(maxsize=32)
def _arborescences(g: GraphInstance) -> tuple[list[str], np.ndarray, np.ndarray]:
    """(edge names, parent-edge index matrix, roots) over all spanning out-trees."""
    n = g.n_vertices
    names = sorted(g.edge_vars())
    pos = {x: i for i, x in enumerate(names)}
    preds: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v in g.edges:
        a, b = g.index(u), g.index(v)
        preds[b].append((a, pos[g.edge_var(u, v)]))
        if not g.directed:
            preds[a].append((b, pos[g.edge_var(u, v)]))
    rows = array("i")
    roots = array("i")
    parent = [-1] * n
    choice = [0] * n

    for root in range(n):
        others = [x for x in range(n) if x != root]

        def rec(t: int):
            if t == len(others):
                rows.extend([choice[x] for x in others])
                roots.append(root)
                return
            x = others[t]
            for p, e in preds[x]:
                # reject p if following parents from p reaches x (would close a cycle)
                y = p
                while y != root and y != x and parent[y] != -1:
                    y = parent[y]
                if y == x:
                    continue
                parent[x] = p
                choice[x] = e
                rec(t + 1)
            parent[x] = -1

        rec(0)
    # Any cycle would pass through its last-assigned vertex, and the walk
    # above rejects exactly that case, so every emitted row is an out-tree.
    mat = np.frombuffer(rows, dtype=np.int32).reshape(len(roots), max(n - 1, 0)) if n > 1 else np.zeros((len(roots), 0), dtype=np.int32)
    return names, mat, np.frombuffer(roots, dtype=np.int32)


def enumerate_arborescences(g: GraphInstance, max_vertices: int = 9) -> list[dict[str, str | None]]:
    """Spanning out-trees as parent maps (root maps to None), all roots."""
    _limit(g, max_vertices, "arborescence")
    names, mat, roots = _arborescences(g)
    edge_of = {}
    for u, v in g.edges:
        edge_of[g.edge_var(u, v)] = (u, v)
    out = []
    for row, root in zip(mat.tolist(), roots.tolist()):
        par: dict[str, str | None] = {g.vertices[root]: None}
        others = [x for x in range(g.n_vertices) if x != root]
        for x, e in zip(others, row):
            u, v = edge_of[names[e]]
            child = g.vertices[x]
            par[child] = u if v == child else v
        out.append(par)
    return out


def arborescence_monomial(g: GraphInstance, parent: Mapping[str, str | None]) -> tuple[str, ...]:
    return tuple(sorted(g.edge_var(p, c) for c, p in parent.items() if p is not None))


def dst_polynomial(g: GraphInstance, max_vertices: int = 9) -> Polynomial:
    _limit(g, max_vertices, "arborescence")
    names, mat, _ = _arborescences(g)
    return Polynomial(tuple(sorted(names[e] for e in row)) for row in mat.tolist())


def count_arborescences(g: GraphInstance, max_vertices: int = 9) -> int:
    _limit(g, max_vertices, "arborescence")
    return int(_arborescences(g)[1].shape[0])


def brute_dst(g: GraphInstance, weights: Mapping[str, int], max_vertices: int = 9) -> OracleResult:
    _limit(g, max_vertices, "arborescence")
    names, mat, roots = _arborescences(g)
    if mat.shape[0] == 0:
        raise WorkbenchError("NOT_CONNECTED")
    w = np.array([weights[x] for x in names], dtype=np.int64)
    tot = w[mat].sum(axis=1) if mat.shape[1] else np.zeros(mat.shape[0], dtype=np.int64)
    i = int(tot.argmin())
    root = int(roots[i])
    others = [x for x in range(g.n_vertices) if x != root]
    witness = {g.vertices[root]: None}
    edge_of = {g.edge_var(u, v): (u, v) for u, v in g.edges}
    for x, e in zip(others, mat[i].tolist()):
        u, v = edge_of[names[e]]
        child = g.vertices[x]
        witness[child] = u if v == child else v
    return OracleResult(int(tot[i]), witness, int(mat.shape[0]))


def dst_optima(g: GraphInstance, valuations: Sequence[Mapping[str, int]], max_vertices: int = 9) -> list[int]:
    _limit(g, max_vertices, "arborescence")
    names, mat, _ = _arborescences(g)
    if mat.shape[0] == 0:
        raise WorkbenchError("NOT_CONNECTED")
    return _min_over(names, mat, valuations)


def bareiss_det(m: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = [row[:] for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for i in range(n - 1):
        if a[i][i] == 0:
            swap = next((r for r in range(i + 1, n) if a[r][i] != 0), None)
            if swap is None:
                return 0
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


def matrix_tree_count(g: GraphInstance) -> int:
    """Number of spanning out-trees over all roots, via the directed matrix-tree theorem."""
    n = g.n_vertices
    lap = [[0] * n for _ in range(n)]
    arcs = list(g.edges) + ([] if g.directed else [(v, u) for u, v in g.edges])
    for u, v in arcs:
        a, b = g.index(u), g.index(v)
        lap[b][b] += 1
        lap[a][b] -= 1
    total = 0
    for root in range(n):
        keep = [i for i in range(n) if i != root]
        total += bareiss_det([[lap[i][j] for j in keep] for i in keep])
    return total


# nice cycles of H_{n,k} --------------------------------------------------------


def enumerate_nice_cycles(n: int, k: int, max_vertices: int = 12) -> list[tuple[str, ...]]:
    """Directed Hamiltonian cycles of H_{n,k} meeting every layer in a perfect matching.

    Each vertex touches exactly two layers and must use one cycle edge from
    each, which prunes the search to the nice cycles directly.  Cycles start
    at v[1][1].
    """
    if 2 * n * k > max_vertices:
        raise ScaleExceeded("SCALE_EXCEEDED", f"2nk = {2 * n * k} > {max_vertices}")
    if n < 2 or k < 1:
        raise WorkbenchError("INVALID_PARAMS")
    m = 2 * k
    verts = [(c, r) for c in range(1, n + 1) for r in range(1, m + 1)]
    idx = {v: i for i, v in enumerate(verts)}
    N = len(verts)

    def layer(a, b):
        (ca, _), (cb, _) = verts[a], verts[b]
        if ca == cb:
            return 0 if ca == 1 else n
        return min(ca, cb)

    adj = [[] for _ in range(N)]
    for a in range(N):
        for b in range(N):
            if a == b:
                continue
            ca, cb = verts[a][0], verts[b][0]
            if abs(ca - cb) == 1 or (ca == cb and ca in (1, n)):
                adj[a].append(b)
    used_layers = [set() for _ in range(N)]
    out = []
    start = idx[(1, 1)]
    path = [start]
    on = [False] * N
    on[start] = True

    def rec():
        u = path[-1]
        if len(path) == N:
            L = layer(u, start)
            if start in adj[u] and L not in used_layers[u] and L not in used_layers[start]:
                out.append(tuple(cv(*verts[x]) for x in path))
            return
        for v in adj[u]:
            if on[v]:
                continue
            L = layer(u, v)
            if L in used_layers[u] or L in used_layers[v]:
                continue
            used_layers[u].add(L)
            used_layers[v].add(L)
            on[v] = True
            path.append(v)
            rec()
            path.pop()
            on[v] = False
            used_layers[u].discard(L)
            used_layers[v].discard(L)

    rec()
    out.sort()
    return out


# shortest paths -----------------------------------------------------------------


def brute_shortest_path(n: int, weights: Mapping[tuple[int, int], int], source: int, target: int) -> int:
    """Minimum weight over all simple source→target paths in the complete digraph on [n]."""
    best = [None]

    def rec(u: int, seen: int, acc: int):
        if u == target:
            if best[0] is None or acc < best[0]:
                best[0] = acc
            return
        for v in range(1, n + 1):
            if v != u and not seen >> v & 1:
                rec(v, seen | 1 << v, acc + weights[(u, v)])

    rec(source, 1 << source, 0)
    return best[0]


def dump_jsonl(structures: Iterable[Any]) -> str:
    lines = []
    for s in structures:
        if isinstance(s, (set, frozenset)):
            s = sorted(s)
        lines.append(json.dumps(s, separators=(",", ":"), sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")

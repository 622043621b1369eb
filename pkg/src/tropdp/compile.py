"""Compilers from dynamic programs to explicit tropical circuits.

The path-decomposition DPs (independent set, Hamiltonian cycle, spanning
out-tree) all run over the same event sequence: between consecutive bags we
forget the leaving vertices, then introduce the entering ones, and every edge
is handled when its later endpoint is introduced.  A DP table maps states to
gates; only reachable states ever get a gate, so the circuits use nothing
beyond extremum and sum gates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .circuit import Circuit, CircuitBuilder, substitute_inputs
from .errors import ScaleExceeded, WorkbenchError
from .graphs import GraphInstance, PathDecomposition, cv, gen_dtsp_graph, gen_tsp_graph, split_v, verify_path_decomposition
from .poly import Flavor


@dataclass
class CompileReport:
    gates: int
    width: int
    bags: int
    max_states: int
    states_per_event: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "gates": self.gates,
            "width": self.width,
            "bags": self.bags,
            "max_states": self.max_states,
            "states_per_event": self.states_per_event,
        }


def _events(g: GraphInstance, d: PathDecomposition):
    """Yield ("forget", v) / ("intro", v, earlier_neighbours) with vertex indices."""
    rep = verify_path_decomposition(g, d)
    if not rep.valid:
        code, detail = rep.violations[0]
        raise WorkbenchError("DECOMPOSITION_INVALID", f"{code}: {detail}")
    idx = g.index
    arcs_at: dict[int, list[tuple[int, int, str]]] = {}
    present: set[int] = set()
    order: list[tuple] = []
    intro_time: dict[int, int] = {}
    t = 0
    prev: set[int] = set()
    for bag in list(d.bags) + [()]:
        cur = {idx(v) for v in bag}
        for v in sorted(prev - cur):
            order.append(("forget", v))
        for v in sorted(cur - prev):
            intro_time[v] = t
            t += 1
            order.append(("intro", v))
        prev = cur
    for u, v in g.edges:
        a, b = idx(u), idx(v)
        late = a if intro_time[a] > intro_time[b] else b
        arcs_at.setdefault(late, []).append((a, b, g.edge_var(u, v)))
    for lst in arcs_at.values():
        lst.sort()
    out = []
    for ev in order:
        if ev[0] == "intro":
            out.append(("intro", ev[1], arcs_at.get(ev[1], [])))
        else:
            out.append(ev)
    del present
    return out, rep.width


class _Table:
    """State → list of gates; ``settle`` folds duplicates into extremum gates."""

    def __init__(self, b: CircuitBuilder):
        self.b = b
        self.acc: dict = {}

    def put(self, state, gate: int):
        lst = self.acc.get(state)
        if lst is None:
            self.acc[state] = [gate]
        else:
            lst.append(gate)

    def settle(self) -> dict:
        out = {s: (gs[0] if len(gs) == 1 else self.b.ext_all(gs)) for s, gs in self.acc.items()}
        self.acc = {}
        return out


def _run(g, d, flavor, start_state, on_intro, on_arc, on_forget, finish, max_width=None, name="dp"):
    b = CircuitBuilder(flavor)
    events, width = _events(g, d)
    if max_width is not None and width > max_width:
        raise ScaleExceeded("WIDTH_EXCEEDED", f"width {width} > {max_width} for {name}")
    states = {start_state: b.const0()}
    remaining = sum(1 for e in events if e[0] == "intro")
    counts = []
    for ev in events:
        if ev[0] == "intro":
            v = ev[1]
            remaining -= 1
            tab = _Table(b)
            for s, gate in states.items():
                for s2, extra in on_intro(s, v):
                    tab.put(s2, gate if extra is None else b.add(gate, b.input(extra)))
            states = tab.settle()
            for a, c, var in ev[2]:
                tab = _Table(b)
                for s, gate in states.items():
                    tab.put(s, gate)
                    s2 = on_arc(s, a, c, remaining == 0)
                    if s2 is not None:
                        tab.put(s2, b.add(gate, b.input(var)))
                states = tab.settle()
        else:
            v = ev[1]
            tab = _Table(b)
            for s, gate in states.items():
                s2 = on_forget(s, v, remaining == 0)
                if s2 is not None:
                    tab.put(s2, gate)
            states = tab.settle()
        counts.append(len(states))
        if not states:
            break
    out = finish(states)
    circ = b.build(out)
    report = CompileReport(circ.size(), width, len(d.bags), max(counts, default=1), counts)
    return circ, report


# independent set --------------------------------------------------------------


def compile_is(g: GraphInstance, d: PathDecomposition, with_report: bool = False):
    """MAX_PLUS circuit over vertex weights computing the best independent set (∅ included)."""
    if g.directed:
        raise WorkbenchError("UNDIRECTED_REQUIRED")
    nbr = [set() for _ in g.vertices]
    for u, v in g.edges:
        nbr[g.index(u)].add(g.index(v))
        nbr[g.index(v)].add(g.index(u))
    names = g.vertices

    def on_intro(s, v):
        yield s, None
        if not any(u in nbr[v] for u in s):
            yield s | {v}, names[v]

    def on_forget(s, v, last):
        return s - {v}

    def finish(states):
        return states[frozenset()]

    circ, rep = _run(g, d, Flavor.MAX_PLUS, frozenset(), on_intro, lambda s, a, c, last: None, on_forget, finish, name="IS")
    # on_arc never fires a take-branch: adjacency is enforced at introduction
    return (circ, rep) if with_report else circ


# Hamiltonian cycle ---------------------------------------------------------------

CLOSED = "CLOSED"


def compile_tsp_pw(
    g: GraphInstance,
    d: PathDecomposition,
    directed: bool | None = None,
    max_width: int = 5,
    with_report: bool = False,
):
    """MIN_PLUS circuit over edge weights computing the cheapest Hamiltonian cycle.

    States: the partial path fragments inside the bag, as (start, end) pairs
    (directed) or sorted endpoint pairs (undirected); a lone vertex is the
    fragment (v, v) and bag vertices in no fragment are path interiors.
    """
    directed = g.directed if directed is None else directed
    if directed != g.directed:
        raise WorkbenchError("DIRECTEDNESS_MISMATCH")
    if g.n_vertices < 3:
        raise WorkbenchError("INVALID_PARAMS", "need at least 3 vertices")

    def on_intro(s, v):
        if s == CLOSED:
            return
        yield tuple(sorted(s + ((v, v),))), None

    def on_arc(s, a, c, last):
        if s == CLOSED:
            return None
        fr = list(s)
        if directed:
            i = next((t for t, f in enumerate(fr) if f[1] == a), None)
            j = next((t for t, f in enumerate(fr) if f[0] == c), None)
            if i is None or j is None:
                return None
            if i == j:
                return CLOSED if last and len(fr) == 1 else None
            merged = (fr[i][0], fr[j][1])
        else:
            i = next((t for t, f in enumerate(fr) if a in f), None)
            j = next((t for t, f in enumerate(fr) if c in f), None)
            if i is None or j is None:
                return None
            if i == j:
                if fr[i][0] == fr[i][1]:
                    return None
                return CLOSED if last and len(fr) == 1 else None
            ea = fr[i][0] if fr[i][1] == a else fr[i][1]
            ec = fr[j][0] if fr[j][1] == c else fr[j][1]
            merged = (min(ea, ec), max(ea, ec))
        rest = [f for t, f in enumerate(fr) if t != i and t != j]
        return tuple(sorted(rest + [merged]))

    def on_forget(s, v, last):
        if s == CLOSED:
            return s
        return None if any(v in f for f in s) else s

    def finish(states):
        if CLOSED not in states:
            raise WorkbenchError("NO_HAMILTONIAN_CYCLE")
        return states[CLOSED]

    circ, rep = _run(g, d, Flavor.MIN_PLUS, (), on_intro, on_arc, on_forget, finish, max_width, "TSP")
    return (circ, rep) if with_report else circ


# spanning out-tree -----------------------------------------------------------------

DONE = "DONE"


def compile_dst_pw(g: GraphInstance, d: PathDecomposition, max_width: int = 4, with_report: bool = False):
    """MIN_PLUS circuit over arc weights computing the cheapest spanning out-tree (any root).

    States: blocks of the partial forest restricted to the bag, each with its
    parentless vertex, or -1 once that root has been forgotten (allowed for
    one block only, since nothing can ever point into it again).
    """
    if not g.directed:
        raise WorkbenchError("DIRECTED_REQUIRED")

    def on_intro(s, v):
        if s == DONE:
            return
        yield tuple(sorted(s + (((v,), v),))), None

    def on_arc(s, a, c, last):
        if s == DONE:
            return None
        bi = next(t for t, blk in enumerate(s) if a in blk[0])
        bj = next(t for t, blk in enumerate(s) if c in blk[0])
        if bi == bj or s[bj][1] != c:
            return None
        merged = (tuple(sorted(s[bi][0] + s[bj][0])), s[bi][1])
        rest = [blk for t, blk in enumerate(s) if t != bi and t != bj]
        return tuple(sorted(rest + [merged]))

    def on_forget(s, v, last):
        if s == DONE:
            return s
        t = next(t for t, blk in enumerate(s) if v in blk[0])
        members, root = s[t]
        if len(members) == 1:
            return DONE if last and len(s) == 1 else None
        if root == v:
            if any(blk[1] == -1 for blk in s):
                return None
            root = -1
        new = (tuple(x for x in members if x != v), root)
        return tuple(sorted(s[:t] + (new,) + s[t + 1 :]))

    def finish(states):
        if DONE not in states:
            raise WorkbenchError("NOT_CONNECTED")
        return states[DONE]

    circ, rep = _run(g, d, Flavor.MIN_PLUS, (), on_intro, on_arc, on_forget, finish, max_width, "DST")
    return (circ, rep) if with_report else circ


# Held–Karp and Floyd–Warshall ---------------------------------------------------------


def complete_digraph(n: int) -> GraphInstance:
    vs = tuple(str(i) for i in range(1, n + 1))
    edges = tuple((u, v) for u in vs for v in vs if u != v)
    return GraphInstance(f"K_{n}", True, vs, edges, {}, {"n": n})


def compile_held_karp(N: int | None = None, graph: GraphInstance | None = None) -> Circuit:
    """Subset DP D(S, v) anchored at the first vertex, over K_N or the arcs of ``graph``."""
    if graph is None:
        if N is None:
            raise WorkbenchError("INVALID_PARAMS", "need N or a graph")
        graph = complete_digraph(N)
    n = graph.n_vertices
    if not 3 <= n <= 14:
        raise ScaleExceeded("SCALE_EXCEEDED", f"Held-Karp supports 3..14 vertices, got {n}")
    arcs = {}
    for u, v in graph.edges:
        a, c = graph.index(u), graph.index(v)
        arcs[(a, c)] = graph.edge_var(u, v)
        if not graph.directed:
            arcs[(c, a)] = graph.edge_var(u, v)
    b = CircuitBuilder(Flavor.MIN_PLUS, graph.edge_vars())
    D: dict[tuple[int, int], int] = {}
    for v in range(1, n):
        if (0, v) in arcs:
            D[(1 << v, v)] = b.input(arcs[(0, v)])
    full = ((1 << n) - 1) & ~1
    for S in range(1, full + 1):
        if S & 1 or bin(S).count("1") < 2:
            continue
        for v in range(1, n):
            if not S >> v & 1:
                continue
            prev = S & ~(1 << v)
            terms = []
            for u in range(1, n):
                if prev >> u & 1 and (prev, u) in D and (u, v) in arcs:
                    terms.append(b.add(D[(prev, u)], b.input(arcs[(u, v)])))
            if terms:
                D[(S, v)] = b.ext_all(terms)
    closing = [b.add(D[(full, v)], b.input(arcs[(v, 0)])) for v in range(1, n) if (full, v) in D and (v, 0) in arcs]
    if not closing:
        raise WorkbenchError("NO_HAMILTONIAN_CYCLE")
    return b.build(b.ext_all(closing))


class FloydWarshallDag:
    """One shared gate sequence for all pairs; ``circuit(i, j)`` picks the output."""

    def __init__(self, N: int):
        if not 2 <= N <= 30:
            raise ScaleExceeded("SCALE_EXCEEDED", f"Floyd-Warshall supports 2..30 vertices, got {N}")
        self.N = N
        b = CircuitBuilder(Flavor.MIN_PLUS)
        d = {(i, j): b.input(f"x({i},{j})") for i in range(1, N + 1) for j in range(1, N + 1) if i != j}
        for m in range(1, N + 1):
            nd = dict(d)
            for i in range(1, N + 1):
                for j in range(1, N + 1):
                    if i == j or m in (i, j):
                        continue
                    nd[(i, j)] = b.ext(d[(i, j)], b.add(d[(i, m)], d[(m, j)]))
            d = nd
        self.final = d
        self.base = b.build(d[(1, 2)])

    def circuit(self, source: int, target: int) -> Circuit:
        if source == target or (source, target) not in self.final:
            raise WorkbenchError("INVALID_PARAMS", f"bad pair {source}->{target}")
        return self.base.with_output(self.final[(source, target)])


def compile_floyd_warshall(N: int, source: int, target: int) -> Circuit:
    return FloydWarshallDag(N).circuit(source, target)


# substitution reduction ------------------------------------------------------------


def reduce_undirected_to_directed(c: Circuit, n: int, k: int) -> Circuit:
    """Turn a TSP circuit of Ḡ_{n,k} into a DTSP circuit of G_{n,k} of the same size.

    Crossing edges (v[c][r1][1], v[c+1][r2][−1]) become arcs v[c][r1] → v[c+1][r2];
    the internal path edges of each split vertex become constants 0.
    """
    gbar, _ = gen_tsp_graph(n, k)
    g, _ = gen_dtsp_graph(n, k)
    mapping: dict[str, str | None] = {}
    for c_ in range(1, n + 1):
        for r in range(1, k + 1):
            mapping[gbar.edge_var(split_v(c_, r, -1), split_v(c_, r, 0))] = None
            mapping[gbar.edge_var(split_v(c_, r, 0), split_v(c_, r, 1))] = None
            for r2 in range(1, k + 1):
                nxt = c_ % n + 1
                mapping[gbar.edge_var(split_v(c_, r, 1), split_v(nxt, r2, -1))] = g.edge_var(cv(c_, r), cv(nxt, r2))
    return substitute_inputs(c, mapping)


COMPILERS: dict[str, Callable] = {
    "is": compile_is,
    "tsp": compile_tsp_pw,
    "dst": compile_dst_pw,
}


def compile_family_names() -> Iterable[str]:
    return ("is", "tsp", "dtsp", "dst", "held-karp", "floyd-warshall")

"""Graph families with path-decomposition certificates.

Families: the 2-CNF independent-set graph G_k, the directed layered cycle
G_{n,k}, its undirected split version Ḡ_{n,k}, and the spanning-tree family
H_{n,k}.  Also the permutation encodings of their Hamiltonian cycles and a
uniform sampler of nice cycles of H_{n,k}.

Vertex labels are strings such as ``v[2][1]`` or ``w[1][2][0][1]``; vertex
order inside an instance is construction order, which is what canonical
cycle forms use.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import VerificationFailure, WorkbenchError
from .poly import INT64_MAX
from .perm import Permutation, compose, compose_many, cycle_type, inverse, is_single_cycle


@dataclass(frozen=True)
class GraphInstance:
    name: str
    directed: bool
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    layers: Mapping[str, tuple[int, ...]] = field(default_factory=dict, compare=False)
    params: Mapping[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise WorkbenchError("DUPLICATE_VERTEX")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise WorkbenchError("SELF_LOOP", u)
            if u not in vset or v not in vset:
                raise WorkbenchError("UNKNOWN_VERTEX", f"{u}->{v}")
            key = (u, v) if self.directed else frozenset((u, v))
            if key in seen:
                raise WorkbenchError("DUPLICATE_EDGE", f"{u}-{v}")
            seen.add(key)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})
        object.__setattr__(self, "_edge_set", seen)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        return self._index[v]

    def has_edge(self, u: str, v: str) -> bool:
        return ((u, v) if self.directed else frozenset((u, v))) in self._edge_set

    def edge_var(self, u: str, v: str) -> str:
        """Variable naming the weight of edge u→v (or {u,v} when undirected)."""
        if not self.directed and v < u:
            u, v = v, u
        return f"x({u},{v})"

    def edge_vars(self) -> list[str]:
        return [self.edge_var(u, v) for u, v in self.edges]

    def variables(self) -> list[str]:
        """Edge variables for TSP/DST instances; vertex labels serve as IS variables."""
        return self.edge_vars()

    def out_neighbors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            if not self.directed:
                adj[v].append(u)
        return adj

    def in_neighbors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[v].append(u)
            if not self.directed:
                adj[u].append(v)
        return adj

    def neighbors(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "directed": self.directed,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "layers": {v: list(t) for v, t in self.layers.items()},
            "params": dict(self.params),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping) -> "GraphInstance":
        return cls(
            name=d.get("name", "graph"),
            directed=bool(d["directed"]),
            vertices=tuple(d["vertices"]),
            edges=tuple((u, v) for u, v in d["edges"]),
            layers={v: tuple(t) for v, t in d.get("layers", {}).items()},
            params=dict(d.get("params", {})),
        )

    def to_dot(self) -> str:
        kind, arrow = ("digraph", "->") if self.directed else ("graph", "--")
        lines = [f"{kind} G {{"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for u, v in self.edges:
            lines.append(f'  "{u}" {arrow} "{v}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[tuple[str, ...], ...]

    @classmethod
    def of(cls, bags: Iterable[Iterable[str]]) -> "PathDecomposition":
        return cls(tuple(tuple(b) for b in bags))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def to_dict(self) -> dict:
        return {"bags": [list(b) for b in self.bags]}

    @classmethod
    def from_dict(cls, d: Mapping) -> "PathDecomposition":
        return cls.of(d["bags"])


@dataclass
class DecompositionReport:
    valid: bool
    width: int | None
    violations: list[tuple[str, str]]

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "width": self.width,
            "violations": [{"code": c, "detail": d} for c, d in self.violations],
        }


def verify_path_decomposition(g: GraphInstance, d: PathDecomposition) -> DecompositionReport:
    vset = set(g.vertices)
    violations: list[tuple[str, str]] = []
    where: dict[str, list[int]] = {v: [] for v in g.vertices}
    for i, bag in enumerate(d.bags):
        for v in bag:
            if v not in vset:
                violations.append(("UNKNOWN_VERTEX", f"bag {i}: {v}"))
            elif not where[v] or where[v][-1] != i:
                where[v].append(i)
    for v in g.vertices:
        idx = where[v]
        if not idx:
            violations.append(("INTERVAL_BROKEN", f"{v} occurs in no bag"))
        elif idx[-1] - idx[0] + 1 != len(idx):
            violations.append(("INTERVAL_BROKEN", f"{v} occurs in bags {idx}"))
    for u, v in g.edges:
        if not where.get(u) or not where.get(v):
            violations.append(("EDGE_UNCOVERED", f"{u}-{v}"))
            continue
        lo = max(where[u][0], where[v][0])
        hi = min(where[u][-1], where[v][-1])
        if lo > hi:
            violations.append(("EDGE_UNCOVERED", f"{u}-{v}"))
    if violations:
        return DecompositionReport(False, None, violations)
    return DecompositionReport(True, d.width, [])


# G_k: independent set -----------------------------------------------------------


def is_clauses(k: int) -> list[tuple[int, int, int, int]]:
    """All 2-CNF clauses (a, b, na, nb), a < b, in lexicographic order."""
    return [(a, b, na, nb) for a, b in combinations(range(1, k + 1), 2) for na in (0, 1) for nb in (0, 1)]


def lit(i: int, j: int) -> str:
    return f"v[{i}][{j}]"


def clause_vertex(a: int, b: int, na: int, nb: int) -> str:
    return f"w[{a}][{b}][{na}][{nb}]"


def gen_is_graph(k: int) -> tuple[GraphInstance, PathDecomposition]:
    if k < 2:
        raise WorkbenchError("INVALID_K", "G_k needs k >= 2 (no clauses otherwise)")
    clauses = is_clauses(k)
    q = len(clauses)
    vertices = [lit(i, j) for i in range(1, k + 1) for j in range(2 * q)]
    vertices += [clause_vertex(*c) for c in clauses]
    edges = [(lit(i, j - 1), lit(i, j)) for i in range(1, k + 1) for j in range(1, 2 * q)]
    layers = {lit(i, j): (j, i) for i in range(1, k + 1) for j in range(2 * q)}
    for t, (a, b, na, nb) in enumerate(clauses):
        w = clause_vertex(a, b, na, nb)
        edges.append((w, lit(a, 2 * t + na)))
        edges.append((w, lit(b, 2 * t + nb)))
        layers[w] = (2 * t, 0)
    g = GraphInstance(f"G_{k}", False, tuple(vertices), tuple(edges), layers, {"k": k, "q": q})
    # Sweep literal columns left to right, swapping one row at a time; the
    # clause vertex for columns 2t, 2t+1 rides along through that transition.
    bags: list[list[str]] = []
    current = [lit(i, 0) for i in range(1, k + 1)]
    for j in range(2 * q - 1):
        extra = [clause_vertex(*clauses[j // 2])] if j % 2 == 0 else []
        bags.append(current + extra)
        for i in range(1, k + 1):
            bags.append(current + [lit(i, j + 1)] + extra)
            current = [lit(r, j + 1) if r == i else x for r, x in zip(range(1, k + 1), current)]
        bags.append(current + extra)
    return g, _dedupe(bags)


def _dedupe(bags: list[list[str]]) -> PathDecomposition:
    out: list[tuple[str, ...]] = []
    for b in bags:
        t = tuple(b)
        if not out or set(out[-1]) != set(t):
            out.append(t)
    return PathDecomposition(tuple(out))


def canonical_solution(k: int, assignment: Sequence[int]) -> frozenset[str]:
    if k < 2:
        raise WorkbenchError("INVALID_K", "G_k needs k >= 2")
    if len(assignment) != k or any(b not in (0, 1) for b in assignment):
        raise WorkbenchError("INVALID_ASSIGNMENT", repr(assignment))
    clauses = is_clauses(k)
    q = len(clauses)
    out = {lit(i, 2 * j + assignment[i - 1]) for i in range(1, k + 1) for j in range(q)}
    for a, b, na, nb in clauses:
        if assignment[a - 1] != na and assignment[b - 1] != nb:
            out.add(clause_vertex(a, b, na, nb))
    return frozenset(out)


def all_assignments(k: int) -> list[tuple[int, ...]]:
    return [tuple((m >> (k - 1 - i)) & 1 for i in range(k)) for m in range(2**k)]


def is_independent(g: GraphInstance, vs: Iterable[str]) -> bool:
    s = set(vs)
    return not any(u in s and v in s for u, v in g.edges)


# G_{n,k}, Ḡ_{n,k}, H_{n,k} ----------------------------------------------------------


def _check_nk(n: int, k: int):
    if n < 2 or k < 1:
        raise WorkbenchError("INVALID_PARAMS", f"need n >= 2 and k >= 1, got n={n}, k={k}")


def cv(c: int, r: int) -> str:
    return f"v[{c}][{r}]"


def split_v(c: int, r: int, s: int) -> str:
    return f"v[{c}][{r}][{s}]"


def gen_dtsp_graph(n: int, k: int) -> tuple[GraphInstance, PathDecomposition]:
    _check_nk(n, k)
    vertices = [cv(c, r) for c in range(1, n + 1) for r in range(1, k + 1)]
    edges = [
        (cv(c, r1), cv(c % n + 1, r2))
        for c in range(1, n + 1)
        for r1 in range(1, k + 1)
        for r2 in range(1, k + 1)
    ]
    layers = {cv(c, r): (c, r) for c in range(1, n + 1) for r in range(1, k + 1)}
    g = GraphInstance(f"G_{{{n},{k}}}", True, tuple(vertices), tuple(edges), layers, {"n": n, "k": k})
    col = lambda c: [cv(c, r) for r in range(1, k + 1)]  # noqa: E731
    bags = [col(1) + col(2)] + [col(1) + col(c) + col(c + 1) for c in range(2, n)]
    return g, _dedupe(bags)


def gen_tsp_graph(n: int, k: int) -> tuple[GraphInstance, PathDecomposition]:
    """Ḡ_{n,k}: every vertex of G_{n,k} split into a 3-path (sublayers −1, 0, 1)."""
    _check_nk(n, k)
    rows = range(1, k + 1)
    vertices = [split_v(c, r, s) for c in range(1, n + 1) for r in rows for s in (-1, 0, 1)]
    edges = []
    for c in range(1, n + 1):
        for r in rows:
            edges.append((split_v(c, r, -1), split_v(c, r, 0)))
            edges.append((split_v(c, r, 0), split_v(c, r, 1)))
        for r1 in rows:
            for r2 in rows:
                edges.append((split_v(c, r1, 1), split_v(c % n + 1, r2, -1)))
    layers = {split_v(c, r, s): (c, r, s) for c in range(1, n + 1) for r in rows for s in (-1, 0, 1)}
    g = GraphInstance(f"Gbar_{{{n},{k}}}", False, tuple(vertices), tuple(edges), layers, {"n": n, "k": k})

    keep = [split_v(1, r, -1) for r in rows]  # entry ports of column 1 stay until the end
    bags: list[list[str]] = []
    for c in range(1, n + 1):
        state = [] if c == 1 else [split_v(c, r, -1) for r in rows]
        for r in rows:
            mid, out = split_v(c, r, 0), split_v(c, r, 1)
            bags.append(keep + state + [mid])
            if c > 1:
                state.remove(split_v(c, r, -1))
            bags.append(keep + state + [mid, out])
            state.append(out)
        nxt = [] if c == n else [split_v(c + 1, r, -1) for r in rows]
        bags.append(keep + state + nxt)
    return g, _dedupe(bags)


def gen_dst_graph(n: int, k: int) -> tuple[GraphInstance, PathDecomposition]:
    _check_nk(n, k)
    rows = range(1, 2 * k + 1)
    vertices = [cv(c, r) for c in range(1, n + 1) for r in rows]
    edges = []
    for c in range(1, n + 1):
        if c in (1, n):
            edges += [(cv(c, r1), cv(c, r2)) for r1 in rows for r2 in rows if r1 != r2]
        if c < n:
            edges += [(cv(c, r1), cv(c + 1, r2)) for r1 in rows for r2 in rows]
            edges += [(cv(c + 1, r2), cv(c, r1)) for r1 in rows for r2 in rows]
    layers = {cv(c, r): (c, r) for c in range(1, n + 1) for r in rows}
    g = GraphInstance(f"H_{{{n},{k}}}", True, tuple(vertices), tuple(edges), layers, {"n": n, "k": k})
    col = lambda c: [cv(c, r) for r in rows]  # noqa: E731
    return g, _dedupe([col(c) + col(c + 1) for c in range(1, n)])


def layer_edge_sets(g: GraphInstance) -> list[list[tuple[str, str]]]:
    """E_i per family: G_{n,k} → E_1..E_n (by tail column); H_{n,k} → E_0..E_n."""
    n = g.params["n"]
    if g.name.startswith("H_"):
        sets: list[list[tuple[str, str]]] = [[] for _ in range(n + 1)]
        for u, v in g.edges:
            cu, cv_ = g.layers[u][0], g.layers[v][0]
            if cu == cv_:
                sets[0 if cu == 1 else n].append((u, v))
            else:
                sets[min(cu, cv_)].append((u, v))
        return sets
    if g.name.startswith("G_{"):
        sets = [[] for _ in range(n + 1)]
        for u, v in g.edges:
            sets[g.layers[u][0]].append((u, v))
        return sets
    raise WorkbenchError("INVALID_FAMILY", g.name)


# Hamiltonian cycles and permutation sequences -------------------------------


def canonical_cycle(g: GraphInstance, cycle: Sequence[str]) -> tuple[str, ...]:
    """Rotate to start at the least vertex; undirected cycles also pick the smaller direction."""
    cyc = list(cycle)
    if not cyc:
        return ()
    start = min(range(len(cyc)), key=lambda i: g.index(cyc[i]))
    rot = cyc[start:] + cyc[:start]
    if not g.directed and len(rot) > 2:
        rev = [rot[0]] + rot[:0:-1]
        if g.index(rev[1]) < g.index(rot[1]):
            rot = rev
    return tuple(rot)


def cycle_edges(cycle: Sequence[str]) -> list[tuple[str, str]]:
    return [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def is_hamiltonian_cycle(g: GraphInstance, cycle: Sequence[str]) -> bool:
    if len(cycle) != g.n_vertices or set(cycle) != set(g.vertices) or len(cycle) < 2:
        return False
    return all(g.has_edge(u, v) for u, v in cycle_edges(cycle))


def cycle_to_sequence(g: GraphInstance, cycle: Sequence[str]) -> list[Permutation]:
    """ρ_1..ρ_n with ρ_c(s) = t iff the cycle uses v[c][s] → v[c+1][t]."""
    if not is_hamiltonian_cycle(g, cycle):
        raise WorkbenchError("NOT_HAMILTONIAN")
    n, k = g.params["n"], g.params["k"]
    img = [[-1] * k for _ in range(n)]
    for u, v in cycle_edges(cycle):
        c, s = g.layers[u]
        img[c - 1][s - 1] = g.layers[v][1] - 1
    return [Permutation(row) for row in img]


def sequence_to_cycle(g: GraphInstance, seq: Sequence[Sequence[int]]) -> tuple[str, ...]:
    n, k = g.params["n"], g.params["k"]
    if len(seq) != n or any(len(p) != k for p in seq):
        raise WorkbenchError("INVALID_SEQUENCE", "need n permutations of [k]")
    if not is_single_cycle(compose_many(*reversed(list(seq)))):
        raise WorkbenchError("PRODUCT_NOT_SINGLE_CYCLE")
    c, r = 1, 0
    out = []
    for _ in range(n * k):
        out.append(cv(c, r + 1))
        r = seq[c - 1][r]
        c = c % n + 1
    return canonical_cycle(g, out)


def directed_to_undirected_cycle(gbar: GraphInstance, cycle: Sequence[str]) -> tuple[str, ...]:
    """Image of a directed G_{n,k} cycle in Ḡ_{n,k}: each vertex becomes its 3-path."""
    out = []
    for v in cycle:
        c, r = (int(x) for x in v[2:-1].split("]["))
        out += [split_v(c, r, -1), split_v(c, r, 0), split_v(c, r, 1)]
    return canonical_cycle(gbar, out)


def eq1_product(seq: Sequence[Sequence[int]], i: int) -> Permutation:
    """(L ρ_0 L⁻¹)(R⁻¹ ρ_n R) with L = ρ_{i−1}…ρ_1 and R = ρ_{n−1}…ρ_i (empty products = id)."""
    n = len(seq) - 1
    m = len(seq[0])
    ident = Permutation.identity(m)
    left = compose_many(*[seq[j] for j in range(i - 1, 0, -1)]) if i > 1 else ident
    right = compose_many(*[seq[j] for j in range(n - 1, i - 1, -1)]) if i < n else ident
    a = compose_many(left, seq[0], inverse(left))
    b = compose_many(inverse(right), seq[n], right)
    return compose(a, b)


def nice_cycle_content(g: GraphInstance, cycle: Sequence[str]) -> list[Permutation]:
    """ρ_0..ρ_n of a nice cycle of H_{n,k}; raises NOT_NICE otherwise."""
    if not is_hamiltonian_cycle(g, cycle):
        raise WorkbenchError("NOT_HAMILTONIAN")
    n, k = g.params["n"], g.params["k"]
    m = 2 * k
    img = [[-1] * m for _ in range(n + 1)]
    for u, v in cycle_edges(cycle):
        (cu, ru), (cv_, rv) = g.layers[u], g.layers[v]
        if cu == cv_:
            layer = 0 if cu == 1 else n
            a, b = ru - 1, rv - 1
        else:
            layer = min(cu, cv_)
            a, b = (ru - 1, rv - 1) if cu < cv_ else (rv - 1, ru - 1)
        if img[layer][a] != -1 or (cu == cv_ and img[layer][b] != -1):
            raise WorkbenchError("NOT_NICE", f"layer {layer} is not a matching")
        img[layer][a] = b
        if cu == cv_:
            img[layer][b] = a
    seq = []
    for layer, row in enumerate(img):
        if -1 in row or sorted(row) != list(range(m)):
            raise WorkbenchError("NOT_NICE", f"layer {layer} is not a perfect matching")
        seq.append(Permutation(row))
    for i in range(1, n + 1):
        if cycle_type(eq1_product(seq, i)) != (k, k):
            raise VerificationFailure("EQ1_VIOLATED", f"cut {i}")
    return seq


def sample_nice_cycle(n: int, k: int, seed: int | random.Random) -> tuple[str, ...]:
    """Uniform nice directed Hamiltonian cycle of H_{n,k} via the layer-by-layer procedure."""
    _check_nk(n, k)
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    m = 2 * k
    succ: dict[str, str] = {}
    # Step 1: uniform perfect matching on column 1 with independent orientations.
    pts = list(range(m))
    rng.shuffle(pts)
    is_tail = [False] * m  # vertex of the current column already has its out-edge
    for t in range(0, m, 2):
        a, b = pts[t], pts[t + 1]
        if rng.random() < 0.5:
            a, b = b, a
        succ[cv(1, a + 1)] = cv(1, b + 1)
        is_tail[a] = True
    # Step 2: uniform matching between consecutive columns, orientation forced.
    for c in range(1, n):
        rho = rng.sample(range(m), m)
        nxt = [False] * m
        for s in range(m):
            t = rho[s]
            if is_tail[s]:
                succ[cv(c + 1, t + 1)] = cv(c, s + 1)
                nxt[t] = True
            else:
                succ[cv(c, s + 1)] = cv(c + 1, t + 1)
        is_tail = nxt
    # Step 3: close the k paths ending in column n into one cycle.
    starts = [cv(n, r + 1) for r in range(m) if is_tail[r]]
    ends = []
    for s in starts:
        x = s
        while x in succ:
            x = succ[x]
        ends.append(x)
    order = list(range(1, k))
    rng.shuffle(order)
    order = [0] + order
    for idx in range(k):
        j, nxt_path = order[idx], order[(idx + 1) % k]
        succ[ends[j]] = starts[nxt_path]
    start = cv(1, 1)
    out = [start]
    x = succ[start]
    while x != start:
        out.append(x)
        x = succ[x]
    return tuple(out)


def nice_cycle_key(cycle: Sequence[str]) -> tuple[str, ...]:
    """Directed cycles of H_{n,k} rotated to start at v[1][1]."""
    i = list(cycle).index(cv(1, 1))
    return tuple(cycle[i:]) + tuple(cycle[:i])


# closed forms ---------------------------------------------------------------------


FAMILIES = ("dtsp-cycles", "dst-sequences", "dst-nice-cycles")


def count_formulas(family: str, n: int, k: int) -> int:
    _check_nk(n, k)
    fam = family.lower().replace("_", "-")
    if fam == "dtsp-cycles":
        val = math.factorial(k - 1) * math.factorial(k) ** (n - 1)
    elif fam == "dst-sequences":
        val = math.factorial(2 * k) ** (n - 1) * math.factorial(2 * k - 1)
    elif fam == "dst-nice-cycles":
        val = 2 * math.factorial(2 * k) ** (n - 1) * math.factorial(2 * k - 1)
    else:
        raise WorkbenchError("INVALID_PARAMS", f"unknown family {family!r}")
    if val > INT64_MAX:
        raise WorkbenchError("OVERFLOW", f"{family}({n},{k}) exceeds 64 bits")
    return val


# random instances for tests -----------------------------------------------------


def banded_decomposition(vertices: Sequence[str], band: int) -> PathDecomposition:
    if len(vertices) <= band + 1:
        return PathDecomposition((tuple(vertices),))
    return PathDecomposition(tuple(tuple(vertices[i : i + band + 1]) for i in range(len(vertices) - band)))


def random_banded_graph(
    nv: int, band: int, p: float, seed: int, directed: bool = False, name: str = "random"
) -> tuple[GraphInstance, PathDecomposition]:
    """Random graph whose edges join vertices at most ``band`` apart (width ≤ band)."""
    rng = random.Random(seed)
    vs = [f"u{i}" for i in range(nv)]
    edges = []
    for i in range(nv):
        for j in range(i + 1, min(nv, i + band + 1)):
            if directed:
                if rng.random() < p:
                    edges.append((vs[i], vs[j]))
                if rng.random() < p:
                    edges.append((vs[j], vs[i]))
            elif rng.random() < p:
                edges.append((vs[i], vs[j]))
    g = GraphInstance(name, directed, tuple(vs), tuple(edges), {}, {"seed": seed})
    return g, banded_decomposition(vs, band)


def random_hamiltonian_digraph(nv: int, p: float, seed: int) -> tuple[GraphInstance, PathDecomposition]:
    """Random digraph of bandwidth 2 containing the tour 0, 2, 4, …, then odd vertices downwards."""
    rng = random.Random(seed)
    vs = [f"u{i}" for i in range(nv)]
    tour = list(range(0, nv, 2)) + sorted(range(1, nv, 2), reverse=True)
    arcs = {(tour[i], tour[(i + 1) % nv]) for i in range(nv)}
    for i in range(nv):
        for j in range(i + 1, min(nv, i + 3)):
            for a, b in ((i, j), (j, i)):
                if rng.random() < p:
                    arcs.add((a, b))
    edges = tuple((vs[a], vs[b]) for a, b in sorted(arcs))
    g = GraphInstance("random-ham", True, tuple(vs), edges, {}, {"seed": seed})
    return g, banded_decomposition(vs, 2)


def random_rooted_digraph(nv: int, band: int, p: float, seed: int) -> tuple[GraphInstance, PathDecomposition]:
    """Random digraph of bandwidth ``band`` with a spanning out-tree rooted at u0."""
    rng = random.Random(seed)
    vs = [f"u{i}" for i in range(nv)]
    arcs = set()
    for i in range(1, nv):
        arcs.add((rng.randrange(max(0, i - band), i), i))
    for i in range(nv):
        for j in range(i + 1, min(nv, i + band + 1)):
            for a, b in ((i, j), (j, i)):
                if rng.random() < p:
                    arcs.add((a, b))
    edges = tuple((vs[a], vs[b]) for a, b in sorted(arcs))
    g = GraphInstance("random-rooted", True, tuple(vs), edges, {}, {"seed": seed})
    return g, banded_decomposition(vs, band)


def simple_graph(vertices: Sequence[str], edges: Iterable[tuple[str, str]], directed: bool, name: str = "graph"):
    g = GraphInstance(name, directed, tuple(vertices), tuple(edges))
    return g, PathDecomposition((tuple(vertices),))


GENERATORS = {
    "dtsp": gen_dtsp_graph,
    "tsp": gen_tsp_graph,
    "dst": gen_dst_graph,
}

"""Tropical circuits: DAGs of input, constant-zero, extremum and sum gates.

Gates live in three parallel arrays (op code, left operand, right operand)
plus a map from input gates to their variables; compiled circuits reach a
few million gates and per-gate objects would not fit comfortably.
"""

from __future__ import annotations

import json
from array import array
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ScaleExceeded, WorkbenchError
from .poly import INT64_MAX, Flavor, Polynomial, check_int64

INPUT, CONST0, EXT, SUM = 0, 1, 2, 3
OP_NAMES = {INPUT: "input", CONST0: "const0", EXT: "ext", SUM: "sum"}
OP_CODES = {v: k for k, v in OP_NAMES.items()}

DEFAULT_CAP = 2_000_000


class Gate(NamedTuple):
    op: str
    var: str | None = None
    left: int | None = None
    right: int | None = None


@dataclass
class ValidationReport:
    valid: bool
    errors: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    def codes(self) -> set[str]:
        return {c for c, _ in self.errors}

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "errors": [{"code": c, "detail": d} for c, d in self.errors],
            "warnings": [{"code": c, "detail": d} for c, d in self.warnings],
        }


class Circuit:
    """Immutable tropical circuit.

    ``left``/``right`` hold -1 where an operand is absent; malformed circuits
    can be constructed (e.g. from JSON) and are rejected by :meth:`validate`
    or on first evaluation.
    """

    def __init__(
        self,
        ops: Sequence[int],
        left: Sequence[int],
        right: Sequence[int],
        var: Mapping[int, str],
        output: int,
        flavor: Flavor | str = Flavor.MAX_PLUS,
        universe: Iterable[str] | None = None,
    ):
        self.ops = array("B", ops)
        self.left = array("q", left)
        self.right = array("q", right)
        self.var = dict(var)
        self.output = int(output)
        self.flavor = Flavor.parse(flavor)
        if universe is None:
            universe = self.var.values()
        self.universe = tuple(sorted(set(universe)))
        self._order: list[int] | None = None
        self._degree_bound: int | None = None
        self._levels = None

    def size(self) -> int:
        return len(self.ops)

    __len__ = size

    def gate(self, i: int) -> Gate:
        op = self.ops[i]
        if op == INPUT:
            return Gate("input", var=self.var.get(i))
        if op == CONST0:
            return Gate("const0")
        l, r = self.left[i], self.right[i]
        return Gate(OP_NAMES[op], left=None if l < 0 else l, right=None if r < 0 else r)

    def gates(self) -> list[Gate]:
        return [self.gate(i) for i in range(self.size())]

    def with_output(self, output: int) -> "Circuit":
        """Same gate sequence, different designated output (shares the arrays)."""
        c = Circuit.__new__(Circuit)
        c.ops, c.left, c.right, c.var = self.ops, self.left, self.right, self.var
        c.output, c.flavor, c.universe = int(output), self.flavor, self.universe
        c._order, c._degree_bound, c._levels = self._order, None, self._levels
        return c

    # validation -----------------------------------------------------------

    def validate(self) -> ValidationReport:
        n = self.size()
        errors: list[tuple[str, str]] = []
        warnings: list[tuple[str, str]] = []
        uni = set(self.universe)
        for i in range(n):
            op = self.ops[i]
            if op not in OP_NAMES:
                errors.append(("BAD_OP", f"gate {i}: op code {op}"))
                continue
            l, r = self.left[i], self.right[i]
            if op in (INPUT, CONST0):
                if l >= 0 or r >= 0:
                    errors.append(("BAD_FANIN", f"gate {i}: {OP_NAMES[op]} with predecessors"))
                if op == INPUT:
                    if i not in self.var:
                        errors.append(("BAD_INPUT", f"gate {i}: input without variable"))
                    elif self.var[i] not in uni:
                        errors.append(("VARIABLE_NOT_IN_UNIVERSE", f"gate {i}: {self.var[i]}"))
            else:
                if l < 0 or r < 0:
                    errors.append(("BAD_FANIN", f"gate {i}: {OP_NAMES[op]} needs two predecessors"))
                for x in (l, r):
                    if x >= n:
                        errors.append(("BAD_REFERENCE", f"gate {i}: operand {x} does not exist"))
        if not 0 <= self.output < n:
            errors.append(("NO_OUTPUT", f"output {self.output} does not exist"))
        if not any(c in ("BAD_REFERENCE", "BAD_OP") for c, _ in errors):
            if self._topo_order(raise_on_cycle=False) is None:
                errors.append(("CYCLE_DETECTED", "gate graph has a directed cycle"))
            elif 0 <= self.output < n:
                live = self._cone(self.output)
                dead = n - len(live)
                if dead:
                    warnings.append(("UNREACHABLE", f"{dead} gate(s) do not reach the output"))
        return ValidationReport(valid=not errors, errors=errors, warnings=warnings)

    def _preds(self, i: int):
        if self.ops[i] in (EXT, SUM):
            return (self.left[i], self.right[i])
        return ()

    def _topo_order(self, raise_on_cycle: bool = True):
        if self._order is not None:
            return self._order
        n = self.size()
        indeg = [0] * n
        succ: list[list[int]] = [[] for _ in range(n)]
        for i in range(n):
            for p in self._preds(i):
                if 0 <= p < n:
                    indeg[i] += 1
                    succ[p].append(i)
        queue = deque(i for i in range(n) if indeg[i] == 0)
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for s in succ[u]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    queue.append(s)
        if len(order) != n:
            if raise_on_cycle:
                raise WorkbenchError("CYCLE_DETECTED")
            return None
        self._order = order
        return order

    def _cone(self, root: int) -> set[int]:
        seen = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            for p in self._preds(u):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def _require_valid(self):
        if self._order is None:
            rep = self.validate()
            if not rep.valid:
                code, detail = rep.errors[0]
                raise WorkbenchError("INVALID_CIRCUIT", f"{code}: {detail}")

    def cone_order(self, root: int | None = None) -> list[int]:
        """Topological order restricted to gates feeding ``root`` (default: output)."""
        self._require_valid()
        root = self.output if root is None else root
        cone = self._cone(root)
        return [i for i in self._topo_order() if i in cone]

    # evaluation -------------------------------------------------------------

    def degree_bound(self) -> int:
        """Largest total degree of any monomial at any gate (drives overflow checks)."""
        if self._degree_bound is None:
            self._require_valid()
            deg = [0] * self.size()
            ops, L, R = self.ops, self.left, self.right
            for i in self._topo_order():
                op = ops[i]
                if op == INPUT:
                    deg[i] = 1
                elif op == SUM:
                    deg[i] = deg[L[i]] + deg[R[i]]
                elif op == EXT:
                    deg[i] = max(deg[L[i]], deg[R[i]])
            self._degree_bound = max(deg, default=0)
        return self._degree_bound

    def evaluate(self, v: Mapping[str, int]) -> int:
        self._require_valid()
        order = self.cone_order()
        vals: dict[int, int] = {}
        ops, L, R = self.ops, self.left, self.right
        pick = max if self.flavor is Flavor.MAX_PLUS else min
        for i in order:
            op = ops[i]
            if op == INPUT:
                try:
                    vals[i] = v[self.var[i]]
                except KeyError:
                    raise WorkbenchError("MISSING_VARIABLE", self.var[i]) from None
            elif op == CONST0:
                vals[i] = 0
            elif op == SUM:
                vals[i] = check_int64(vals[L[i]] + vals[R[i]])
            else:
                vals[i] = pick(vals[L[i]], vals[R[i]])
        return vals[self.output]

    def _level_schedule(self):
        if self._levels is None:
            self._require_valid()
            n = self.size()
            lvl = np.zeros(n, dtype=np.int64)
            ops, L, R = self.ops, self.left, self.right
            lv = [0] * n
            for i in self._topo_order():
                if ops[i] in (EXT, SUM):
                    a, b = lv[L[i]], lv[R[i]]
                    lv[i] = (a if a > b else b) + 1
            lvl[:] = lv
            opsa = np.frombuffer(self.ops, dtype=np.uint8).astype(np.int64)
            La = np.frombuffer(self.left, dtype=np.int64)
            Ra = np.frombuffer(self.right, dtype=np.int64)
            order = np.argsort(lvl, kind="stable")
            bounds = np.searchsorted(lvl[order], np.arange(lvl.max(initial=0) + 2))
            steps = []
            for d in range(1, len(bounds) - 1):
                idx = order[bounds[d] : bounds[d + 1]]
                if idx.size == 0:
                    continue
                e = idx[opsa[idx] == EXT]
                s = idx[opsa[idx] == SUM]
                steps.append((e, La[e], Ra[e], s, La[s], Ra[s]))
            inputs = [i for i in range(n) if ops[i] == INPUT]
            self._levels = (np.array(inputs, dtype=np.int64), [self.var[i] for i in inputs], steps)
        return self._levels

    def evaluate_batch(self, valuations: Sequence[Mapping[str, int]]) -> list[int]:
        """Vectorised evaluation of many valuations at once (exact int64)."""
        if not valuations:
            return []
        inputs, names, steps = self._level_schedule()
        biggest = 0
        for v in valuations:
            for name in names:
                if name not in v:
                    raise WorkbenchError("MISSING_VARIABLE", name)
            if names:
                biggest = max(biggest, max(abs(v[name]) for name in names))
        if biggest * max(self.degree_bound(), 1) > INT64_MAX:
            return [self.evaluate(v) for v in valuations]
        n = self.size()
        chunk = max(1, min(len(valuations), 4_000_000 // max(n, 1)))
        out: list[int] = []
        for start in range(0, len(valuations), chunk):
            batch = valuations[start : start + chunk]
            vals = np.zeros((n, len(batch)), dtype=np.int64)
            if names:
                vals[inputs] = np.array([[v[name] for v in batch] for name in names], dtype=np.int64)
            ext = np.maximum if self.flavor is Flavor.MAX_PLUS else np.minimum
            for e, el, er, s, sl, sr in steps:
                if e.size:
                    vals[e] = ext(vals[el], vals[er])
                if s.size:
                    vals[s] = vals[sl] + vals[sr]
            out.extend(int(x) for x in vals[self.output])
        return out

    # serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        gates = []
        for i in range(self.size()):
            op = self.ops[i]
            if op == INPUT:
                gates.append({"op": "input", "var": self.var.get(i)})
            elif op == CONST0:
                gates.append({"op": "const0"})
            else:
                g = {"op": OP_NAMES.get(op, str(op))}
                if self.left[i] >= 0:
                    g["l"] = self.left[i]
                if self.right[i] >= 0:
                    g["r"] = self.right[i]
                gates.append(g)
        return {
            "flavor": self.flavor.value,
            "universe": list(self.universe),
            "gates": gates,
            "output": self.output,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping) -> "Circuit":
        ops, left, right, var = [], [], [], {}
        for i, g in enumerate(d["gates"]):
            code = OP_CODES.get(g.get("op"))
            if code is None:
                raise WorkbenchError("BAD_OP", f"gate {i}: {g.get('op')!r}")
            ops.append(code)
            left.append(int(g.get("l", -1)))
            right.append(int(g.get("r", -1)))
            if code == INPUT and g.get("var") is not None:
                var[i] = str(g["var"])
        return cls(ops, left, right, var, d["output"], d.get("flavor", "max"), d.get("universe"))

    @classmethod
    def from_json(cls, s: str) -> "Circuit":
        return cls.from_dict(json.loads(s))

    def to_dot(self) -> str:
        sym = {EXT: "max" if self.flavor is Flavor.MAX_PLUS else "min", SUM: "+"}
        lines = ["digraph circuit {", "  rankdir=BT;"]
        for i in range(self.size()):
            op = self.ops[i]
            if op == INPUT:
                label = self.var.get(i, "?")
            elif op == CONST0:
                label = "0"
            else:
                label = sym.get(op, "?")
            shape = "doublecircle" if i == self.output else ("box" if op in (INPUT, CONST0) else "circle")
            lines.append(f'  g{i} [label="{label}", shape={shape}];')
            for p in self._preds(i):
                if p >= 0:
                    lines.append(f"  g{p} -> g{i};")
        lines.append("}")
        return "\n".join(lines) + "\n"


class CircuitBuilder:
    """Append-only construction; input and constant gates are shared."""

    def __init__(self, flavor: Flavor | str = Flavor.MAX_PLUS, universe: Iterable[str] = ()):
        self.flavor = Flavor.parse(flavor)
        self.universe = set(universe)
        self.ops = array("B")
        self.left = array("q")
        self.right = array("q")
        self.var: dict[int, str] = {}
        self._inputs: dict[str, int] = {}
        self._const: int | None = None

    def __len__(self) -> int:
        return len(self.ops)

    def _push(self, op: int, l: int = -1, r: int = -1) -> int:
        self.ops.append(op)
        self.left.append(l)
        self.right.append(r)
        return len(self.ops) - 1

    def input(self, name: str) -> int:
        g = self._inputs.get(name)
        if g is None:
            g = self._push(INPUT)
            self.var[g] = name
            self._inputs[name] = g
            self.universe.add(name)
        return g

    def const0(self) -> int:
        if self._const is None:
            self._const = self._push(CONST0)
        return self._const

    def ext(self, a: int, b: int) -> int:
        return self._push(EXT, a, b)

    def add(self, a: int, b: int) -> int:
        return self._push(SUM, a, b)

    def ext_all(self, gates: Sequence[int]) -> int:
        if not gates:
            raise WorkbenchError("EMPTY_EXTREMUM")
        acc = gates[0]
        for g in gates[1:]:
            acc = self.ext(acc, g)
        return acc

    def add_all(self, gates: Sequence[int]) -> int:
        if not gates:
            return self.const0()
        acc = gates[0]
        for g in gates[1:]:
            acc = self.add(acc, g)
        return acc

    def build(self, output: int) -> Circuit:
        return Circuit(self.ops, self.left, self.right, self.var, output, self.flavor, self.universe)


def validate(c: Circuit) -> ValidationReport:
    return c.validate()


def evaluate(c: Circuit, v: Mapping[str, int]) -> int:
    return c.evaluate(v)


def extract_gate_sets(c: Circuit, root: int | None = None, cap: int = DEFAULT_CAP) -> dict[int, set]:
    """Monomial sets (as canonical sorted tuples) for every gate in ``root``'s cone.

    ``cap`` bounds the total number of stored monomials across all gates.
    """
    order = c.cone_order(root)
    ops, L, R, var = c.ops, c.left, c.right, c.var
    sets: dict[int, set] = {}
    used = 0
    for i in order:
        op = ops[i]
        if op == INPUT:
            s = {(var[i],)}
        elif op == CONST0:
            s = {()}
        elif op == EXT:
            s = sets[L[i]] | sets[R[i]]
        else:
            A, B = sets[L[i]], sets[R[i]]
            if len(A) * len(B) + used > cap:
                raise ScaleExceeded("CAP_EXCEEDED", f"gate {i} would exceed {cap} monomial slots")
            s = set()
            for a in A:
                if not a:
                    s.update(B)
                    continue
                for b in B:
                    s.add(tuple(sorted(a + b)) if b else a)
        used += len(s)
        if used > cap:
            raise ScaleExceeded("CAP_EXCEEDED", f"more than {cap} monomial slots")
        sets[i] = s
    return sets


def extract_polynomial(c: Circuit, cap: int = DEFAULT_CAP, root: int | None = None) -> Polynomial:
    root = c.output if root is None else root
    return Polynomial(extract_gate_sets(c, root, cap)[root])


def calculates(c: Circuit, p: Polynomial, cap: int = DEFAULT_CAP) -> bool:
    f = extract_polynomial(c, cap)
    if not f.is_multilinear() or not p.is_multilinear():
        raise WorkbenchError("NOT_MULTILINEAR")
    return f.monomials == p.monomials


def substitute_inputs(c: Circuit, mapping: Mapping[str, str | None]) -> Circuit:
    """Relabel input gates; a variable mapped to ``None`` becomes a constant-0 gate.

    Gate count never grows, which is what the circuit-substitution reductions rely on.
    """
    ops = array("B", c.ops)
    var = {}
    for i, name in c.var.items():
        if name in mapping:
            new = mapping[name]
            if new is None:
                ops[i] = CONST0
            else:
                var[i] = new
        else:
            var[i] = name
    return Circuit(ops, c.left, c.right, var, c.output, c.flavor, var.values())

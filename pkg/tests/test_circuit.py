from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropdp.circuit import (
    Circuit,
    CircuitBuilder,
    calculates,
    evaluate,
    extract_polynomial,
    substitute_inputs,
    validate,
)
from tropdp.compile import compile_is
from tropdp.errors import ScaleExceeded, WorkbenchError
from tropdp.graphs import PathDecomposition, simple_graph
from tropdp.oracle import is_polynomial
from tropdp.poly import Monomial, Polynomial, eval_poly


def three_path():
    g, _ = simple_graph("abc", [("a", "b"), ("b", "c")], directed=False)
    return g, PathDecomposition.of([["a", "b"], ["b", "c"]])


def test_validate_examples():
    b = CircuitBuilder()
    c = b.build(b.input("x"))
    assert validate(c).valid
    selfref = Circuit.from_dict({"flavor": "max", "gates": [{"op": "input", "var": "x"}, {"op": "sum", "l": 1, "r": 0}], "output": 1})
    rep = validate(selfref)
    assert not rep.valid and "CYCLE_DETECTED" in rep.codes()
    onearg = Circuit.from_dict({"flavor": "max", "gates": [{"op": "input", "var": "x"}, {"op": "ext", "l": 0}], "output": 1})
    assert "BAD_FANIN" in validate(onearg).codes()
    noout = Circuit.from_dict({"flavor": "max", "gates": [{"op": "const0"}], "output": 4})
    assert "NO_OUTPUT" in validate(noout).codes()


def test_dead_gates_warned_and_counted():
    b = CircuitBuilder()
    x, y = b.input("x"), b.input("y")
    b.add(x, y)
    c = b.build(x)
    rep = validate(c)
    assert rep.valid and rep.warnings
    assert c.size() == 3


def test_evaluate_examples():
    b = CircuitBuilder("max")
    c = b.build(b.ext(b.input("x"), b.input("y")))
    assert evaluate(c, {"x": 3, "y": 5}) == 5
    b = CircuitBuilder("max")
    assert evaluate(b.build(b.const0()), {}) == 0
    b = CircuitBuilder("min")
    c = b.build(b.add(b.input("x"), b.input("y")))
    assert evaluate(c, {"x": 2, "y": -7}) == -5
    with pytest.raises(WorkbenchError) as e:
        evaluate(c, {"x": 2})
    assert e.value.code == "MISSING_VARIABLE"


def test_extract_examples():
    b = CircuitBuilder()
    c = b.build(b.ext(b.add(b.input("x"), b.input("y")), b.input("z")))
    assert extract_polynomial(c) == Polynomial(["xy", "z"])
    b = CircuitBuilder()
    x = b.input("x")
    assert extract_polynomial(b.build(b.add(x, x))) == Polynomial([Monomial(["x", "x"])])
    g, d = three_path()
    assert extract_polynomial(compile_is(g, d)) == Polynomial(["", "a", "b", "c", "ac"])


def test_extract_cap():
    b = CircuitBuilder()
    acc = b.const0()
    for i in range(12):
        acc = b.add(acc, b.ext(b.input(f"a{i}"), b.input(f"b{i}")))
    with pytest.raises(ScaleExceeded) as e:
        extract_polynomial(b.build(acc), cap=1000)
    assert e.value.code == "CAP_EXCEEDED"


def test_calculates_examples():
    b = CircuitBuilder()
    x = b.input("x")
    assert calculates(b.build(b.ext(x, x)), Polynomial.var("x"))
    b = CircuitBuilder()
    assert not calculates(b.build(b.add(b.input("x"), b.input("y"))), Polynomial.var("x"))
    g, d = three_path()
    assert calculates(compile_is(g, d), is_polynomial(g))
    b = CircuitBuilder()
    x = b.input("x")
    with pytest.raises(WorkbenchError) as e:
        calculates(b.build(b.add(x, x)), Polynomial.var("x"))
    assert e.value.code == "NOT_MULTILINEAR"


def test_with_output_shares_gates():
    b = CircuitBuilder()
    x, y = b.input("x"), b.input("y")
    s = b.add(x, y)
    c = b.build(s)
    c2 = c.with_output(x)
    assert c2.size() == c.size()
    assert evaluate(c2, {"x": 4, "y": 1}) == 4


def test_substitute_inputs_to_constant():
    b = CircuitBuilder()
    c = b.build(b.add(b.input("x"), b.input("y")))
    c2 = substitute_inputs(c, {"y": None, "x": "z"})
    assert c2.size() == c.size()
    assert extract_polynomial(c2) == Polynomial(["z"])


# property tests -------------------------------------------------------------

VARS = ["p", "q", "r", "s"]


@st.composite
def random_circuits(draw):
    b = CircuitBuilder(draw(st.sampled_from(["max", "min"])), VARS)
    pool = [b.input(v) for v in VARS[: draw(st.integers(1, 4))]]
    if draw(st.booleans()):
        pool.append(b.const0())
    for _ in range(draw(st.integers(0, 12))):
        l, r = draw(st.sampled_from(pool)), draw(st.sampled_from(pool))
        pool.append(b.ext(l, r) if draw(st.booleans()) else b.add(l, r))
    return b.build(pool[-1])


@given(random_circuits(), st.lists(st.integers(-50, 50), min_size=4, max_size=4))
def test_evaluation_matches_extracted_polynomial(c, weights):
    v = dict(zip(VARS, weights))
    assert validate(c).valid
    assert evaluate(c, v) == eval_poly(extract_polynomial(c), v, c.flavor)


@given(random_circuits(), st.integers(0, 2**32))
def test_json_round_trip(c, seed):
    c2 = Circuit.from_json(c.to_json())
    assert c2.to_json() == c.to_json()
    assert c2.size() == c.size() and c2.output == c.output
    rng = random.Random(seed)
    for _ in range(5):
        v = {x: rng.randint(-50, 50) for x in VARS}
        assert evaluate(c2, v) == evaluate(c, v)


@given(random_circuits(), st.lists(st.lists(st.integers(-50, 50), min_size=4, max_size=4), min_size=1, max_size=6))
def test_batch_evaluation_matches_scalar(c, rows):
    vals = [dict(zip(VARS, r)) for r in rows]
    assert c.evaluate_batch(vals) == [evaluate(c, v) for v in vals]

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropdp import oracle
from tropdp.circuit import calculates, evaluate, extract_polynomial, validate
from tropdp.compile import (
    FloydWarshallDag,
    compile_dst_pw,
    compile_floyd_warshall,
    compile_held_karp,
    compile_is,
    compile_tsp_pw,
    complete_digraph,
    reduce_undirected_to_directed,
)
from tropdp.errors import ScaleExceeded, WorkbenchError
from tropdp.graphs import (
    PathDecomposition,
    gen_dst_graph,
    gen_dtsp_graph,
    gen_is_graph,
    gen_tsp_graph,
    random_banded_graph,
    random_hamiltonian_digraph,
    random_rooted_digraph,
    simple_graph,
)
from tropdp.poly import Flavor, Polynomial


def rand_vals(g, rng, lo=-20, hi=20, count=20):
    return [{x: rng.randint(lo, hi) for x in g.edge_vars()} for _ in range(count)]


# independent set ---------------------------------------------------------------


def test_is_three_path():
    g, _ = simple_graph("abc", [("a", "b"), ("b", "c")], directed=False)
    c = compile_is(g, PathDecomposition.of([["a", "b"], ["b", "c"]]))
    assert c.flavor is Flavor.MAX_PLUS and validate(c).valid
    assert extract_polynomial(c) == Polynomial(["", "a", "b", "c", "ac"])
    assert evaluate(c, {"a": 3, "b": -1, "c": 2}) == 5


def test_is_single_vertex():
    g, d = simple_graph("v", [], directed=False)
    assert extract_polynomial(compile_is(g, d)) == Polynomial(["", "v"])


def test_is_errors():
    g, _ = simple_graph("abc", [("a", "b"), ("b", "c")], directed=False)
    with pytest.raises(WorkbenchError) as e:
        compile_is(g, PathDecomposition.of([["a", "b"], ["c"]]))
    assert e.value.code == "DECOMPOSITION_INVALID"
    dg, dd = simple_graph("ab", [("a", "b")], directed=True)
    with pytest.raises(WorkbenchError):
        compile_is(dg, dd)


def test_is_on_gk_calculates_polynomial():
    g, d = gen_is_graph(2)
    c = compile_is(g, d)
    assert validate(c).valid
    assert calculates(c, oracle.is_polynomial(g))


@settings(max_examples=40)
@given(st.integers(2, 12), st.integers(1, 4), st.floats(0.1, 0.9), st.integers(0, 2**31))
def test_is_matches_oracle(nv, band, p, seed):
    g, d = random_banded_graph(nv, band, p, seed)
    c, rep = compile_is(g, d, with_report=True)
    rng = random.Random(seed)
    for _ in range(5):
        w = {v: rng.randint(-50, 50) for v in g.vertices}
        assert evaluate(c, w) == oracle.brute_is(g, w).optimum
    if nv <= 10:
        assert calculates(c, oracle.is_polynomial(g))
    assert rep.gates == c.size()
    # gates per (state × bag) stays bounded by a small constant
    assert c.size() <= 8 * 2 ** (rep.width + 1) * max(1, rep.bags) + 2 * nv


# Hamiltonian cycles ---------------------------------------------------------------


def test_directed_triangle():
    g, d = simple_graph("abc", [("a", "b"), ("b", "c"), ("c", "a")], directed=True)
    c = compile_tsp_pw(g, d)
    assert c.flavor is Flavor.MIN_PLUS
    assert evaluate(c, {x: 1 for x in g.edge_vars()}) == 3


@pytest.mark.parametrize("n,k", [(3, 1), (4, 1), (3, 2), (4, 2)])
def test_dtsp_family_matches_oracle(n, k):
    g, d = gen_dtsp_graph(n, k)
    c = compile_tsp_pw(g, d)
    assert validate(c).valid
    assert calculates(c, oracle.tsp_polynomial(g))
    vals = rand_vals(g, random.Random(n * 10 + k), 0, 20, 100)
    assert c.evaluate_batch(vals) == oracle.tsp_optima(g, vals)


def test_dtsp_g31_single_monomial():
    g, d = gen_dtsp_graph(3, 1)
    f = extract_polynomial(compile_tsp_pw(g, d))
    assert len(f) == 1 and all(len(m) == 3 for m in f)


def test_tsp_undirected_family():
    for n, k in [(3, 1), (3, 2)]:
        g, d = gen_tsp_graph(n, k)
        c = compile_tsp_pw(g, d)
        assert calculates(c, oracle.tsp_polynomial(g, max_vertices=18))


def test_undirected_reduction_preserves_size_and_polynomial():
    gb, db = gen_tsp_graph(3, 2)
    cb = compile_tsp_pw(gb, db)
    red = reduce_undirected_to_directed(cb, 3, 2)
    g, _ = gen_dtsp_graph(3, 2)
    assert red.size() == cb.size()
    assert extract_polynomial(red) == oracle.tsp_polynomial(g)


@settings(max_examples=20)
@given(st.integers(3, 8), st.floats(0.2, 0.9), st.integers(0, 2**31))
def test_tsp_random_digraphs(nv, p, seed):
    g, d = random_hamiltonian_digraph(nv, p, seed)
    rng = random.Random(seed)
    vals = rand_vals(g, rng, count=10)
    want = oracle.tsp_optima(g, vals)
    assert compile_tsp_pw(g, d).evaluate_batch(vals) == want
    assert compile_held_karp(graph=g).evaluate_batch(vals) == want


def test_tsp_errors():
    g, d = simple_graph("ab", [("a", "b"), ("b", "a")], directed=True)
    with pytest.raises(WorkbenchError):
        compile_tsp_pw(g, d)
    g, d = simple_graph("abc", [("a", "b"), ("b", "c")], directed=True)
    with pytest.raises(WorkbenchError) as e:
        compile_tsp_pw(g, d)
    assert e.value.code == "NO_HAMILTONIAN_CYCLE"
    g, d = gen_dtsp_graph(4, 3)
    with pytest.raises(ScaleExceeded) as e:
        compile_tsp_pw(g, d)
    assert e.value.code == "WIDTH_EXCEEDED"


# spanning out-trees -----------------------------------------------------------------


def test_dst_two_cycle():
    g, d = simple_graph("uv", [("u", "v"), ("v", "u")], directed=True)
    c = compile_dst_pw(g, d)
    assert evaluate(c, {g.edge_var("u", "v"): 4, g.edge_var("v", "u"): 7}) == 4


def test_dst_bidirected_path():
    g, _ = simple_graph("abc", [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")], directed=True)
    d = PathDecomposition.of([["a", "b"], ["b", "c"]])
    f = extract_polynomial(compile_dst_pw(g, d))
    assert f == oracle.dst_polynomial(g)
    assert len(f) == oracle.count_arborescences(g) == 3
    assert all(len(m) == 2 for m in f)


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1)])
def test_dst_family_matches_oracle(n, k):
    g, d = gen_dst_graph(n, k)
    c = compile_dst_pw(g, d)
    assert validate(c).valid
    assert calculates(c, oracle.dst_polynomial(g))
    vals = rand_vals(g, random.Random(n), count=100)
    assert c.evaluate_batch(vals) == oracle.dst_optima(g, vals)


@settings(max_examples=20)
@given(st.integers(2, 7), st.integers(1, 2), st.floats(0.1, 0.8), st.integers(0, 2**31))
def test_dst_random_digraphs(nv, band, p, seed):
    g, d = random_rooted_digraph(nv, band, p, seed)
    c = compile_dst_pw(g, d)
    vals = rand_vals(g, random.Random(seed), count=10)
    assert c.evaluate_batch(vals) == oracle.dst_optima(g, vals)


def test_dst_errors():
    g, d = simple_graph("abc", [("a", "b")], directed=True)
    with pytest.raises(WorkbenchError) as e:
        compile_dst_pw(g, d)
    assert e.value.code == "NOT_CONNECTED"
    g, d = gen_dst_graph(2, 2)
    with pytest.raises(ScaleExceeded) as e:
        compile_dst_pw(g, d)
    assert e.value.code == "WIDTH_EXCEEDED"


# Held-Karp and Floyd-Warshall ------------------------------------------------------


def test_held_karp_examples():
    c3 = compile_held_karp(3)
    assert evaluate(c3, {x: 1 for x in complete_digraph(3).edge_vars()}) == 3
    assert len(extract_polynomial(compile_held_karp(4))) == 6
    k6 = complete_digraph(6)
    c6 = compile_held_karp(6)
    vals = rand_vals(k6, random.Random(6), 0, 50, 50)
    assert c6.evaluate_batch(vals) == oracle.tsp_optima(k6, vals)
    with pytest.raises(ScaleExceeded):
        compile_held_karp(15)


def test_held_karp_gate_shape():
    for N in range(3, 11):
        assert compile_held_karp(N).size() <= 2 * N * N * 2**N


def test_floyd_warshall_examples():
    c = compile_floyd_warshall(2, 1, 2)
    assert evaluate(c, {"x(1,2)": 7, "x(2,1)": 3}) == 7
    c = compile_floyd_warshall(3, 1, 3)
    w = {"x(1,2)": 1, "x(2,3)": 1, "x(1,3)": 5, "x(2,1)": 9, "x(3,1)": 9, "x(3,2)": 9}
    assert evaluate(c, w) == 2
    with pytest.raises(ScaleExceeded):
        FloydWarshallDag(31)
    with pytest.raises(WorkbenchError):
        compile_floyd_warshall(3, 2, 2)


def test_floyd_warshall_n8():
    N = 8
    dag = FloydWarshallDag(N)
    assert dag.base.size() == 2 * N * (N - 1) * (N - 2) + N * (N - 1) <= 2 * N**3
    rng = random.Random(8)
    for _ in range(100):
        w = {(i, j): rng.randint(0, 30) for i in range(1, N + 1) for j in range(1, N + 1) if i != j}
        s, t = rng.sample(range(1, N + 1), 2)
        v = {f"x({i},{j})": x for (i, j), x in w.items()}
        assert evaluate(dag.circuit(s, t), v) == oracle.brute_shortest_path(N, w, s, t)

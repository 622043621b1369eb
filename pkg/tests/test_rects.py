from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropdp import oracle, rects
from tropdp.circuit import CircuitBuilder, extract_polynomial
from tropdp.compat import build_matrix, min_cover
from tropdp.compile import compile_dst_pw, compile_held_karp, compile_tsp_pw
from tropdp.errors import WorkbenchError
from tropdp.graphs import all_assignments, canonical_solution, gen_dst_graph, gen_dtsp_graph, layer_edge_sets
from tropdp.poly import Polynomial
from tropdp.rects import (
    PolyRectangle,
    SetRectangle,
    above,
    above_of,
    below,
    check_decomposition,
    check_rectangle_bound_dtsp,
    check_thin,
    decompose_balanced,
    monochromatic_layers,
    useful_sets,
)


def test_decompose_single_product():
    b = CircuitBuilder()
    c = b.build(b.add(b.input("x"), b.input("y")))
    out = decompose_balanced(c, ["x", "y"])
    assert len(out) == 1
    r = out[0]
    assert {r.g, r.h} == {Polynomial(["x"]), Polynomial(["y"])}
    assert r.x_counts(["x", "y"]) == (1, 1)


def test_decompose_two_products():
    b = CircuitBuilder()
    x, y, z = b.input("x"), b.input("y"), b.input("z")
    c = b.build(b.ext(b.add(x, y), b.add(x, z)))
    out = decompose_balanced(c, "xyz")
    assert len(out) <= 3
    chk = check_decomposition(c, "xyz", out)
    assert chk.ok and chk.union_equal


def test_decompose_held_karp_n4():
    c = compile_held_karp(4)
    f = extract_polynomial(c)
    X = sorted(f.support)[::3]
    out = decompose_balanced(c, X)
    assert check_decomposition(c, X, out, f).ok


def test_decompose_errors():
    b = CircuitBuilder()
    x, y = b.input("x"), b.input("y")
    c = b.build(b.ext(x, b.add(x, y)))
    with pytest.raises(WorkbenchError) as e:
        decompose_balanced(c, "xy")
    assert e.value.code == "NOT_HOMOGENEOUS"
    b = CircuitBuilder()
    x = b.input("x")
    with pytest.raises(WorkbenchError) as e:
        decompose_balanced(b.build(b.add(x, x)), "x")
    assert e.value.code == "NOT_MULTILINEAR"
    b = CircuitBuilder()
    c = b.build(b.add(b.input("x"), b.input("y")))
    with pytest.raises(WorkbenchError) as e:
        decompose_balanced(c, ["w"])
    assert e.value.code == "X_NOT_IN_SUPPORT"


@pytest.mark.parametrize("n,k", [(3, 2), (4, 2)])
def test_decompose_dtsp(n, k):
    g, d = gen_dtsp_graph(n, k)
    c = compile_tsp_pw(g, d)
    X = rects.dtsp_xbar(n, k)
    out = decompose_balanced(c, X)
    assert check_decomposition(c, X, out).ok


def test_below_above_examples():
    b = CircuitBuilder()
    x, y, z = b.input("x"), b.input("y"), b.input("z")
    c = b.build(b.ext(b.add(x, y), b.add(x, z)))
    f = extract_polynomial(c)
    assert below(c, c.output) == f
    assert above(c, c.output, f) == Polynomial([""])
    assert below(c, x) == Polynomial(["x"])
    assert above_of([frozenset("y")], Polynomial(["xy", "xz"])) == Polynomial(["x"])
    assert above(c, y, f) == Polynomial(["x"])


def test_above_below_product_inside_f():
    g, d = gen_dtsp_graph(3, 2)
    c = compile_tsp_pw(g, d)
    f = extract_polynomial(c)
    cone = set(c.cone_order())
    for w in sorted(cone):
        bw = below(c, w)
        aw = above(c, w, f)
        assert (aw * bw).monomials <= f.monomials


def test_useful_sets_examples():
    sol = canonical_solution(2, (0, 1))
    ua, ub = useful_sets(SetRectangle.of([sol], [()]), 2)
    assert ua == {sol} and ub == {frozenset()}
    ua, ub = useful_sets(SetRectangle.of([()], [()]), 2)
    assert not ua and not ub
    r = rects.split_canonical(2, (1, 0), 20)
    ua, ub = useful_sets(r, 2)
    assert len(ua) == len(ub) == 1
    assert check_thin(r, 2)
    with pytest.raises(WorkbenchError) as e:
        check_thin(SetRectangle.of([()], [()]), 2)
    assert e.value.code == "PRECONDITION_UNMET"


def test_useful_sets_rejects_non_rectangle():
    lit = "v[1][0]"
    with pytest.raises(WorkbenchError) as e:
        useful_sets(SetRectangle.of([[lit]], [[lit]]), 2)
    assert e.value.code == "NOT_A_RECTANGLE"


def test_thin_with_agreeing_prefixes():
    ix = rects._GkIndex.get(2)
    for pos in range(1, len(ix.intro_order)):
        pre, suf = rects.cut_masks(ix, pos)
        sols = [ix.mask(canonical_solution(2, a)) for a in all_assignments(2)]
        by_suffix = {}
        for s in sols:
            by_suffix.setdefault(s & suf, []).append(s & pre)
        for suffix, prefixes in by_suffix.items():
            if len(set(prefixes)) < 2:
                continue
            r = SetRectangle.of([ix.names(p) for p in set(prefixes)], [ix.names(suffix)])
            assert check_thin(r, 2)
            assert len(useful_sets(r, 2)[1]) == 1


def test_exhaustive_thin_k2():
    rep = rects.exhaustive_thin_check(2, 2)
    assert rep.violations == 0 and rep.checked > 0


@given(st.integers(0, 2**31))
def test_sampled_thin_k2(seed):
    rep = rects.sample_thin_check(2, 200, seed)
    assert rep.violations == 0


def test_sampled_thin_k3():
    rep = rects.sample_thin_check(3, 300, 5)
    assert rep.violations == 0 and rep.checked > 0


def test_monochromatic_examples():
    r = PolyRectangle(Polynomial(["x"]), Polynomial(["y"]))
    rows = monochromatic_layers(r, [["x"], ["y"]])
    assert [x["status"] for x in rows] == ["MONO_G", "MONO_H"]
    r = PolyRectangle(Polynomial(["x"]), Polynomial(["y"]))
    assert monochromatic_layers(r, [["x", "y", "z"]])[0] == {"layer": 0, "status": "MIXED", "absent": ["z"]}


def test_dst_colorful_h31():
    g, d = gen_dst_graph(3, 1)
    c = compile_dst_pw(g, d)
    X = rects.dst_layer_vars(g)[1]
    for r in decompose_balanced(c, X):
        assert rects.check_dst_colorful(r, g)["holds"]


def test_dtsp_bound_and_errors():
    ck = min_cover(build_matrix(2, "bipartite")).size
    g, d = gen_dtsp_graph(4, 2)
    c = compile_tsp_pw(g, d)
    for r in decompose_balanced(c, rects.dtsp_xbar(4, 2)):
        rep = check_rectangle_bound_dtsp(r, 4, 2, ck)
        assert rep["holds"] and rep["mixed_ok"]
    f = extract_polynomial(c)
    unbalanced = PolyRectangle(f, Polynomial([""]))
    with pytest.raises(WorkbenchError) as e:
        check_rectangle_bound_dtsp(unbalanced, 4, 2, ck)
    assert e.value.code == "NOT_BALANCED"
    xbar = rects.dtsp_xbar(4, 2)
    bogus = PolyRectangle(Polynomial([xbar[:1]]), Polynomial([xbar[2:3]]))
    with pytest.raises(WorkbenchError) as e:
        check_rectangle_bound_dtsp(bogus, 4, 2, ck)
    assert e.value.code == "NOT_A_RECTANGLE"
    with pytest.raises(WorkbenchError):
        rects.dtsp_rect_bound(4, 1, 1)


def test_layer_sets_partition_edges():
    for gen, n, k in ((gen_dtsp_graph, 4, 2), (gen_dst_graph, 3, 1)):
        g, _ = gen(n, k)
        sets = layer_edge_sets(g)
        flat = [e for s in sets for e in s]
        assert sorted(flat) == sorted(g.edges)


def test_polynomial_rectangle_inside_oracle():
    g, d = gen_dst_graph(2, 1)
    c = compile_dst_pw(g, d)
    f = oracle.dst_polynomial(g)
    X = [g.edge_var(u, v) for u, v in layer_edge_sets(g)[1]]
    for r in decompose_balanced(c, X):
        assert r.product().monomials <= f.monomials
